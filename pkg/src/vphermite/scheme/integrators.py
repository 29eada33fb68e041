"""Time integrators: Lie splitting with implicit Euler, Strang splitting with SDIRK2."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Protocol, TypeVar

import numpy as np

from ..core.exceptions import ConfigurationError, DivergenceError, ObserverError
from ..core.models import (
    DIVERGENCE_THRESHOLD,
    GAMMA,
    FieldSolution,
    HermiteState,
    OperatorKind,
    SchemeConfig,
)
from ..discretization.field import solve_poisson
from .operators import OperatorCache, nonlinear_stage

logger = logging.getLogger(__name__)

Y = TypeVar("Y")
Aux = TypeVar("Aux")


def sdirk2(
    stage_solve: Callable[[Y, float], tuple[Y, Aux]],
    y: Y,
    h: float,
    gamma: float = GAMMA,
) -> tuple[Y, Aux]:
    """One step of the two-stage stiffly accurate SDIRK method.

    The step advances ``y' = -L(y)`` for a linear operator ``L``.
    ``stage_solve(rhs, coef)`` must return ``Y`` with ``Y + coef * L(Y) = rhs``
    together with any auxiliary output of that solve. The result is the second
    stage value, which equals the update because the method is stiffly accurate.
    """
    coef = gamma * h
    y1, _ = stage_solve(y, coef)
    k1 = (y - y1) / coef  # Y_1 = y - gamma h K_1
    y2, aux = stage_solve(y - (1.0 - gamma) * h * k1, coef)
    return y2, aux


@dataclass(frozen=True, eq=False)
class StepSnapshot:
    """What observers see at time level ``n``."""

    n: int
    t: float
    state: HermiteState
    field: FieldSolution
    c2_intermediate: np.ndarray | None  # C_2 after the linear step, Lie scheme only
    dt: float
    order: int


class Observer(Protocol):
    def __call__(self, snapshot: StepSnapshot) -> None: ...


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Final state of a completed run."""

    state: HermiteState
    field: FieldSolution
    steps: int
    t: float
    operators_built: int


class SplittingIntegrator:
    """Advances Hermite coefficients with the configured splitting scheme.

    Operators are factorized on first use and cached for the integrator's
    lifetime.
    """

    def __init__(self, cfg: SchemeConfig, cache: OperatorCache | None = None):
        self.cfg = cfg
        self.cache = cache if cache is not None else OperatorCache()

    def _operator(self, coef: float):
        return self.cache.get(self.cfg.mesh, self.cfg.basis, self.cfg.lam, coef)

    def linear_stage(self, rhs: np.ndarray, coef: float) -> tuple[np.ndarray, FieldSolution]:
        return self._operator(coef).solve(rhs, check_finite=False)

    def field_from_density(self, C0: np.ndarray) -> FieldSolution:
        return solve_poisson(C0, self.cfg.lam, self.cfg.mesh)

    def sdirk2_substep(
        self,
        kind: OperatorKind,
        coeffs: np.ndarray,
        sub_dt: float,
        field: FieldSolution | None = None,
    ) -> tuple[np.ndarray, FieldSolution]:
        """SDIRK2 over ``sub_dt`` for one of the two split flows.

        For the nonlinear flow ``C_0`` is constant, so ``E`` is computed once
        from it (or taken from ``field``) and reused by both stages.
        """
        if kind is OperatorKind.LINEAR:
            return sdirk2(self.linear_stage, coeffs, sub_dt, self.cfg.gamma)

        if field is None:
            field = self.field_from_density(coeffs[0])
        T0 = self.cfg.T0

        def stage(rhs: np.ndarray, coef: float) -> tuple[np.ndarray, FieldSolution]:
            return nonlinear_stage(rhs, field.E, coef, T0), field

        return sdirk2(stage, coeffs, sub_dt, self.cfg.gamma)

    def lie_step(
        self, coeffs: np.ndarray, dt: float,
    ) -> tuple[np.ndarray, FieldSolution, np.ndarray]:
        """First-order step; returns (C^{n+1}, field^{n+1}, C_2 after the linear step)."""
        intermediate, field = self.linear_stage(coeffs, dt)
        updated = nonlinear_stage(intermediate, field.E, dt, self.cfg.T0)
        return updated, field, intermediate[2].copy()

    def strang_step(self, coeffs: np.ndarray, dt: float) -> tuple[np.ndarray, FieldSolution]:
        """Linear half-step, nonlinear full step, linear half-step, each by SDIRK2."""
        # the last linear stage already solved Poisson for the density of ``half``
        half, field = self.sdirk2_substep(OperatorKind.LINEAR, coeffs, 0.5 * dt)
        mid, _ = self.sdirk2_substep(OperatorKind.NONLINEAR, half, dt, field)
        return self.sdirk2_substep(OperatorKind.LINEAR, mid, 0.5 * dt)

    def step(
        self, coeffs: np.ndarray, dt: float,
    ) -> tuple[np.ndarray, FieldSolution, np.ndarray | None]:
        if self.cfg.order == 1:
            return self.lie_step(coeffs, dt)
        updated, field = self.strang_step(coeffs, dt)
        return updated, field, None


def sdirk2_substep(
    kind: OperatorKind,
    state: HermiteState,
    sub_dt: float,
    cfg: SchemeConfig,
    cache: OperatorCache | None = None,
) -> tuple[HermiteState, FieldSolution]:
    coeffs, field = SplittingIntegrator(cfg, cache).sdirk2_substep(kind, state.coeffs, sub_dt)
    return state.with_coeffs(coeffs), field


def strang_step(
    state: HermiteState, dt: float, cfg: SchemeConfig, cache: OperatorCache | None = None,
) -> tuple[HermiteState, FieldSolution]:
    coeffs, field = SplittingIntegrator(cfg, cache).strang_step(state.coeffs, dt)
    return state.with_coeffs(coeffs), field


def lie_step(
    state: HermiteState, dt: float, cfg: SchemeConfig, cache: OperatorCache | None = None,
) -> tuple[HermiteState, FieldSolution, np.ndarray]:
    coeffs, field, c2 = SplittingIntegrator(cfg, cache).lie_step(state.coeffs, dt)
    return state.with_coeffs(coeffs), field, c2


def _check_consistent(cfg: SchemeConfig, initial: HermiteState) -> None:
    if initial.mesh != cfg.mesh:
        raise ConfigurationError("Initial state and scheme use different meshes")
    if initial.basis != cfg.basis:
        raise ConfigurationError(
            f"Initial state basis {initial.basis} does not match scheme basis {cfg.basis}",
        )


def _notify(observers: Sequence[Observer], snapshot: StepSnapshot) -> None:
    for observer in observers:
        try:
            observer(snapshot)
        except Exception as e:
            raise ObserverError(snapshot.n, f"{type(e).__name__}: {e}") from e


def run(
    cfg: SchemeConfig,
    initial: HermiteState,
    observers: Sequence[Observer] = (),
    cache: OperatorCache | None = None,
) -> Trajectory:
    """Advance ``initial`` for ``cfg.n_steps`` steps, notifying observers at every level.

    Observers are called at ``n = 0`` with the Poisson field of the initial
    density, then after each step. Raises ``DivergenceError`` when the state
    becomes non-finite or its largest coefficient exceeds the divergence
    threshold.
    """
    _check_consistent(cfg, initial)
    integrator = SplittingIntegrator(cfg, cache)
    dt = cfg.dt
    n_steps = cfg.n_steps
    logger.info(
        f"Running order-{cfg.order} scheme: {n_steps} steps of dt={dt:g}, lambda={cfg.lam:g}, "
        f"N_x={cfg.mesh.n_cells}, N_H={cfg.n_hermite}",
    )

    state = initial
    field = integrator.field_from_density(initial.coeffs[0])
    _notify(observers, StepSnapshot(0, 0.0, state, field, None, dt, cfg.order))

    coeffs = initial.coeffs
    for n in range(1, n_steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            coeffs, field, c2 = integrator.step(coeffs, dt)
        t = n * dt
        finite = bool(np.all(np.isfinite(coeffs)))
        size = float(np.max(np.abs(coeffs))) if finite else float("inf")
        if not finite or size > DIVERGENCE_THRESHOLD:
            logger.warning(f"Divergence detected at step {n} (t={t:.6g}, max |C|={size:.3e})")
            raise DivergenceError(n, t, size)
        state = initial.with_coeffs(coeffs)
        logger.debug(f"step {n}/{n_steps}: t={t:.6g}, max |C|={size:.6g}")
        _notify(observers, StepSnapshot(n, t, state, field, c2, dt, cfg.order))

    logger.info(f"Run finished at t={n_steps * dt:.6g} after {n_steps} steps")
    return Trajectory(
        state=state,
        field=field,
        steps=n_steps,
        t=n_steps * dt,
        operators_built=len(integrator.cache),
    )
