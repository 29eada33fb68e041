"""Post-processing of diagnostics series: rate fits, periods, growth rates."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float


def fit_slope(lambdas: Sequence[float], errors: Sequence[float]) -> SlopeFit:
    """Least-squares fit of log(error) against log(lambda)."""
    x = np.asarray(lambdas, dtype=float)
    y = np.asarray(errors, dtype=float)
    if x.shape != y.shape:
        raise ValueError("lambdas and errors must have the same length")
    if x.size < 3:
        raise ValueError(f"At least three points are needed for a slope fit, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("Slope fits need strictly positive, finite values")

    log_x, log_y = np.log(x), np.log(y)
    slope, intercept = np.polyfit(log_x, log_y, 1)
    predicted = slope * log_x + intercept
    ss_res = float(np.sum((log_y - predicted) ** 2))
    ss_tot = float(np.sum((log_y - log_y.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(slope=float(slope), intercept=float(intercept), r_squared=r_squared)


def observed_orders(dts: Sequence[float], errors: Sequence[float]) -> list[float]:
    """Observed order between each pair of consecutive step sizes.

    Entry ``i`` pairs ``dts[i]`` with ``dts[i + 1]``. Pairs with a
    non-positive error give ``nan`` so the list stays aligned with ``dts``.
    """
    if len(dts) != len(errors):
        raise ValueError("dts and errors must have the same length")
    orders = []
    for i in range(len(dts) - 1):
        if errors[i] > 0 and errors[i + 1] > 0:
            orders.append(math.log(errors[i] / errors[i + 1]) / math.log(dts[i] / dts[i + 1]))
        else:
            orders.append(math.nan)
    return orders


def dominant_period(
    t: Sequence[float], values: Sequence[float], min_periods: float = 5.0, padding: int = 8,
) -> float:
    """Period of the strongest spectral peak of a uniformly sampled series.

    The mean is removed first. Raises ``ValueError`` for constant series and
    when the series spans fewer than ``min_periods`` periods of the peak.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.size != y.size or t.size < 8:
        raise ValueError("Need at least eight samples of equal-length (t, value) series")
    steps = np.diff(t)
    dt = float(steps.mean())
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-6 * dt:
        raise ValueError("Series must be uniformly sampled in increasing time")

    detrended = y - y.mean()
    if np.max(np.abs(detrended)) <= 1e-14 * max(1.0, float(np.max(np.abs(y)))):
        raise ValueError("Series is constant: no oscillation to measure")

    n_fft = padding * y.size
    spectrum = np.abs(np.fft.rfft(detrended, n=n_fft))
    freqs = np.fft.rfftfreq(n_fft, d=dt)
    i = int(np.argmax(spectrum[1:])) + 1
    offset = 0.0
    if i + 1 < spectrum.size:
        a, b, c = spectrum[i - 1], spectrum[i], spectrum[i + 1]
        denom = a - 2.0 * b + c
        if denom != 0:
            offset = 0.5 * (a - c) / denom
    frequency = (i + offset) * (freqs[1] - freqs[0])
    period = 1.0 / frequency
    span = float(t[-1] - t[0])
    if period * min_periods > span:
        raise ValueError(
            f"Series spans {span:.4g} time units, fewer than {min_periods:g} periods of {period:.4g}",
        )
    logger.debug(f"Dominant period {period:.6g} from {y.size} samples")
    return period


def growth_rate(
    t: Sequence[float], values: Sequence[float], window: tuple[float, float] | None = None,
) -> float:
    """Exponential rate from a least-squares fit of log(value) over ``window``."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=float)
    mask = np.ones(t.size, dtype=bool) if window is None else (t >= window[0]) & (t <= window[1])
    mask &= np.isfinite(y) & (y > 0)
    if mask.sum() < 3:
        raise ValueError("Need at least three positive samples inside the fit window")
    rate, _ = np.polyfit(t[mask], np.log(y[mask]), 1)
    return float(rate)
