"""Hermite basis evaluation, projection, reconstruction and moments.

The basis functions are Psi_k(v) = M(v) h_k(v / sqrt(T0)) with ``h_k`` the
orthonormal probabilists' Hermite polynomials and ``M`` the Maxwellian of
temperature ``T0``. They are orthonormal for the weight 1/M.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_hermitenorm

from ..core.exceptions import ConfigurationError
from ..core.models import HermiteBasisSpec, HermiteState

logger = logging.getLogger(__name__)


def default_quadrature_order(n_hermite: int, floor: int = 128) -> int:
    return max(2 * n_hermite + 8, floor)


def maxwellian(v: np.ndarray, T: float | np.ndarray = 1.0) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.exp(-0.5 * v * v / T) / np.sqrt(2.0 * np.pi * T)


def _normalized_hermite(x: np.ndarray, n_hermite: int) -> np.ndarray:
    """h_0..h_N at ``x``, shape (N+1, *x.shape)."""
    out = np.empty((n_hermite + 1, *x.shape))
    out[0] = 1.0
    if n_hermite >= 1:
        out[1] = x
    for k in range(1, n_hermite):
        out[k + 1] = (x * out[k] - np.sqrt(k) * out[k - 1]) / np.sqrt(k + 1)
    return out


def eval_basis(v: float | np.ndarray, spec: HermiteBasisSpec) -> np.ndarray:
    """Psi_0(v)..Psi_N(v) via the weighted three-term recurrence.

    Returns shape (N+1,) for scalar ``v`` and (N+1, *v.shape) otherwise.
    """
    v_arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v_arr)):
        raise ValueError("Velocity samples must be finite")
    T0 = spec.T0
    psi = np.empty((spec.n_modes, *v_arr.shape))
    psi[0] = maxwellian(v_arr, T0)
    psi[1] = v_arr * psi[0] / np.sqrt(T0)
    for k in range(1, spec.n_hermite):
        psi[k + 1] = (v_arr * psi[k] - np.sqrt(T0 * k) * psi[k - 1]) / np.sqrt(T0 * (k + 1))
    return psi


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights with sum_i w_i g(v_i) ~ integral of g dv for g ~ M * polynomial."""

    nodes: np.ndarray
    weights: np.ndarray
    T0: float
    order: int


@lru_cache(maxsize=32)
def quadrature_rule(order: int, T0: float) -> QuadratureRule:
    """Gauss rule for the weight exp(-v^2 / (2 T0)), rescaled to plain integrals.

    The weights absorb exp(+x^2/2) so that the rule integrates f(v) directly;
    tail weights that underflow are set to zero.
    """
    x, w = roots_hermitenorm(order)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        log_w = np.where(w > 0, np.log(np.where(w > 0, w, 1.0)), -np.inf)
        weights = np.sqrt(T0) * np.exp(log_w + 0.5 * x * x)
    weights = np.where(np.isfinite(weights), weights, 0.0)
    nodes = np.sqrt(T0) * x
    nodes.setflags(write=False)
    weights.setflags(write=False)
    logger.debug(f"Built Gauss-Hermite rule of order {order} for T0={T0}")
    return QuadratureRule(nodes=nodes, weights=weights, T0=T0, order=order)


def _check_order(spec: HermiteBasisSpec, quadrature_order: int | None) -> int:
    order = quadrature_order or default_quadrature_order(spec.n_hermite)
    if order < 2 * spec.n_hermite:
        raise ConfigurationError(
            f"Quadrature order {order} is below 2*N_H = {2 * spec.n_hermite}; "
            "projected coefficients would alias",
        )
    return order


def project_values(
    values: np.ndarray,
    spec: HermiteBasisSpec,
    rule: QuadratureRule,
) -> np.ndarray:
    """Coefficients from profile samples at the rule's nodes.

    ``values`` has shape (..., Q); the result has shape (N+1, ...).
    """
    values = np.asarray(values, dtype=float)
    weighted = values * rule.weights
    # Psi_k / M = h_k(v / sqrt(T0)); evaluate only where the integrand is nonzero
    active = np.any(weighted != 0.0, axis=tuple(range(weighted.ndim - 1)))
    x = rule.nodes[active] / np.sqrt(spec.T0)
    phi = _normalized_hermite(x, spec.n_hermite)
    return np.einsum("kq,...q->k...", phi, weighted[..., active])


def project(
    profile: Callable[[np.ndarray], np.ndarray],
    spec: HermiteBasisSpec,
    quadrature_order: int | None = None,
) -> np.ndarray:
    """C_k = integral of profile(v) Psi_k(v) / M(v) dv by Gauss-Hermite quadrature."""
    order = _check_order(spec, quadrature_order)
    rule = quadrature_rule(order, spec.T0)
    values = np.asarray(profile(rule.nodes), dtype=float)
    if values.shape != rule.nodes.shape:
        raise ValueError(
            f"Profile returned shape {values.shape}, expected {rule.nodes.shape}",
        )
    return project_values(values, spec, rule)


def project_cells(
    profile: Callable[[np.ndarray, np.ndarray], np.ndarray],
    centers: np.ndarray,
    spec: HermiteBasisSpec,
    quadrature_order: int | None = None,
) -> np.ndarray:
    """Project ``profile(x, v)`` cell by cell; returns shape (N+1, n_cells)."""
    order = _check_order(spec, quadrature_order)
    rule = quadrature_rule(order, spec.T0)
    values = np.asarray(profile(centers[:, np.newaxis], rule.nodes[np.newaxis, :]), dtype=float)
    values = np.broadcast_to(values, (centers.size, rule.nodes.size))
    return project_values(values, spec, rule)


def reconstruct(state: HermiteState, v_grid: np.ndarray) -> np.ndarray:
    """f(x_j, v_m) = sum_k C_{k,j} Psi_k(v_m), shape (n_cells, n_v)."""
    psi = eval_basis(np.asarray(v_grid, dtype=float), state.basis)
    return state.coeffs.T @ psi


@dataclass(frozen=True, eq=False)
class Moments:
    """Density, current and kinetic energy density per cell."""

    rho: np.ndarray
    current: np.ndarray
    kinetic: np.ndarray

    @property
    def temperature(self) -> np.ndarray:
        """K / rho per cell."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.kinetic / self.rho


def moments(state: HermiteState) -> Moments:
    if state.basis.n_hermite < 2:
        raise ConfigurationError("Moments need at least three Hermite modes")
    C = state.coeffs
    T0 = state.basis.T0
    return Moments(
        rho=C[0].copy(),
        current=np.sqrt(T0) * C[1],
        kinetic=T0 * (np.sqrt(2.0) * C[2] + C[0]),
    )
