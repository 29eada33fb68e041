"""Observables, error functionals and the per-step diagnostics collector."""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..core.models import (
    DiagnosticsRecord,
    ErrorMode,
    FieldSolution,
    HermiteState,
    OscillationReference,
)
from ..discretization.grid import Mesh1D, cell_integral, d_h, l2_norm, norms
from ..scheme.integrators import StepSnapshot

logger = logging.getLogger(__name__)

ENERGY_GROWTH_LIMIT = 0.01  # relative growth per unit time


def e_slow(state: HermiteState) -> np.ndarray:
    """Quasineutral field surrogate sqrt(2) T0 d_h C_2."""
    return math.sqrt(2.0) * state.basis.T0 * d_h(state.coeffs[2], state.mesh)


def capture_reference(state: HermiteState, field: FieldSolution) -> OscillationReference:
    """Freeze E - E_slow and C_1 at the initial time."""
    e_minus_slow = np.array(field.E - e_slow(state))
    c1 = np.array(state.coeffs[1])
    e_minus_slow.setflags(write=False)
    c1.setflags(write=False)
    return OscillationReference(e_minus_slow=e_minus_slow, c1=c1, lam=field.lam, T0=state.basis.T0)


def oscillatory_parts(ref: OscillationReference, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Plasma oscillation of (E, C_1) launched by the initial data."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    phase = t / ref.lam
    c, s = math.cos(phase), math.sin(phase)
    sqrt_T0 = math.sqrt(ref.T0)
    e_osc = c * ref.e_minus_slow - (sqrt_T0 / ref.lam) * s * ref.c1
    c1_osc = c * ref.c1 + (ref.lam / sqrt_T0) * s * ref.e_minus_slow
    return e_osc, c1_osc


def error_functionals(
    state: HermiteState,
    field: FieldSolution,
    ref: OscillationReference | None,
    t: float,
    mode: ErrorMode = ErrorMode.CONTINUOUS,
) -> tuple[float, float]:
    """Distance of (E, C_1) from the quasineutral limit.

    Continuous mode subtracts the plasma oscillations and needs ``ref``;
    discrete mode measures ||E - E_slow|| and ||C_1||_{h^1}.
    """
    mesh = state.mesh
    slow = e_slow(state)
    if mode is ErrorMode.DISCRETE:
        return l2_norm(field.E - slow, mesh), norms(state.coeffs[1], mesh, 1)[1]
    if ref is None:
        raise ValueError("Continuous error functionals need an oscillation reference")
    e_osc, c1_osc = oscillatory_parts(ref, t)
    return (
        l2_norm(field.E - slow - e_osc, mesh),
        l2_norm(state.coeffs[1] - c1_osc, mesh),
    )


def potential_energy(field: FieldSolution, mesh: Mesh1D) -> float:
    return 0.5 * float(np.dot(mesh.widths, field.E * field.E))


@dataclass(frozen=True)
class ConservationReport:
    mass: float
    flux: float
    total_energy: float


def conservation_report(
    state: HermiteState, field: FieldSolution, mesh: Mesh1D, lam: float,
) -> ConservationReport:
    C = state.coeffs
    T0 = state.basis.T0
    kinetic = T0 * (math.sqrt(2.0) * C[2] + C[0])
    return ConservationReport(
        mass=cell_integral(C[0], mesh),
        flux=cell_integral(C[1], mesh),
        total_energy=0.5 * cell_integral(kinetic + lam**2 * field.E**2, mesh),
    )


def reformulated_residual_field(
    E_prev: np.ndarray,
    E_curr: np.ndarray,
    E_next: np.ndarray,
    C0_next: np.ndarray,
    c2_intermediate: np.ndarray | None,
    dt: float,
    lam: float,
    mesh: Mesh1D,
    T0: float = 1.0,
) -> np.ndarray:
    """Cellwise defect of the discrete harmonic-oscillator identity for d_h E."""
    if c2_intermediate is None:
        raise ValueError("The intermediate C_2 of the linear step is required")
    lam2 = lam * lam
    dE_prev, dE_curr, dE_next = d_h(E_prev, mesh), d_h(E_curr, mesh), d_h(E_next, mesh)
    oscillator = lam2 * (dE_next - 2.0 * dE_curr + dE_prev) / (dt * dt)
    transport = d_h(E_next * C0_next, mesh)
    pressure = d_h(d_h(math.sqrt(2.0) * T0 * c2_intermediate + T0 * C0_next, mesh), mesh)
    nonlinear = lam2 * d_h(E_next * dE_next - E_curr * dE_curr, mesh)
    return oscillator + transport - pressure - nonlinear


def reformulated_residual(
    E_prev: np.ndarray,
    E_curr: np.ndarray,
    E_next: np.ndarray,
    C0_next: np.ndarray,
    c2_intermediate: np.ndarray | None,
    dt: float,
    lam: float,
    mesh: Mesh1D,
    T0: float = 1.0,
) -> float:
    """l2 norm of the reformulated Poisson defect (first-order scheme)."""
    defect = reformulated_residual_field(
        E_prev, E_curr, E_next, C0_next, c2_intermediate, dt, lam, mesh, T0,
    )
    return l2_norm(defect, mesh)


def compute_record(
    state: HermiteState,
    field: FieldSolution,
    ref: OscillationReference,
    t: float,
    residual: float = math.nan,
) -> DiagnosticsRecord:
    """All scalar observables for one time level."""
    mesh = state.mesh
    lam = field.lam
    err0_cont, err1_cont = error_functionals(state, field, ref, t, ErrorMode.CONTINUOUS)
    err0_disc, err1_disc = error_functionals(state, field, ref, t, ErrorMode.DISCRETE)
    report = conservation_report(state, field, mesh, lam)
    return DiagnosticsRecord(
        t=t,
        potential_energy=potential_energy(field, mesh),
        mass=report.mass,
        flux=report.flux,
        total_energy=report.total_energy,
        err0_cont=err0_cont,
        err1_cont=err1_cont,
        err0_disc=err0_disc,
        err1_disc=err1_disc,
        reformulated_residual=residual,
        e_norm=l2_norm(field.E, mesh),
        e_slow_norm=l2_norm(e_slow(state), mesh),
        t_over_lambda=t / lam,
    )


def energy_anomaly(records: list[DiagnosticsRecord], limit: float = ENERGY_GROWTH_LIMIT) -> bool:
    """True if total energy ever grows faster than ``limit`` relative per unit time."""
    if len(records) < 2:
        return False
    initial = records[0].total_energy
    scale = max(abs(initial), 1e-300)
    for record in records[1:]:
        if record.t > 0 and (record.total_energy - initial) / (scale * record.t) > limit:
            return True
    return False


class DiagnosticsCollector:
    """Observer that turns every time level into a ``DiagnosticsRecord``.

    The reformulated Poisson residual is evaluated from the second step on,
    and only for first-order runs; other records carry NaN in that column.
    """

    def __init__(self) -> None:
        self.records: list[DiagnosticsRecord] = []
        self.reference: OscillationReference | None = None
        self._fields: deque[np.ndarray] = deque(maxlen=2)

    def __call__(self, snapshot: StepSnapshot) -> None:
        if snapshot.n == 0:
            self.reference = capture_reference(snapshot.state, snapshot.field)
            self._fields.clear()
        assert self.reference is not None

        residual = math.nan
        if snapshot.order == 1 and snapshot.n >= 2 and len(self._fields) == 2:
            E_prev, E_curr = self._fields
            residual = reformulated_residual(
                E_prev,
                E_curr,
                snapshot.field.E,
                snapshot.state.coeffs[0],
                snapshot.c2_intermediate,
                snapshot.dt,
                snapshot.field.lam,
                snapshot.state.mesh,
                snapshot.state.basis.T0,
            )

        self.records.append(
            compute_record(snapshot.state, snapshot.field, self.reference, snapshot.t, residual),
        )
        self._fields.append(np.array(snapshot.field.E))

    def series(self, name: str) -> np.ndarray:
        if name not in DiagnosticsRecord.CSV_COLUMNS:
            raise KeyError(f"Unknown diagnostics column: {name}")
        return np.array([getattr(r, name) for r in self.records])

    @property
    def times(self) -> np.ndarray:
        return self.series("t")

    def max_of(self, name: str, start: int = 0) -> float:
        values = self.series(name)[start:]
        values = values[np.isfinite(values)]
        return float(values.max()) if values.size else math.nan

    def mass_drift(self) -> float:
        mass = self.series("mass")
        return float(np.max(np.abs(mass - mass[0]))) if mass.size else 0.0

    def max_abs_flux(self) -> float:
        flux = self.series("flux")
        return float(np.max(np.abs(flux))) if flux.size else 0.0

    def energy_anomaly(self) -> bool:
        return energy_anomaly(self.records)
