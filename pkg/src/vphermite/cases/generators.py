"""Initial conditions as Hermite states."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np

from ..core.exceptions import ConfigurationError
from ..core.models import CaseId, CaseSpec, HermiteBasisSpec, HermiteState
from ..discretization.grid import Mesh1D
from ..discretization.hermite import maxwellian, project_cells

logger = logging.getLogger(__name__)

CASE_QUADRATURE_FLOOR = 256

CellProfile = Callable[[np.ndarray, np.ndarray], np.ndarray]


def case_quadrature_order(basis: HermiteBasisSpec, requested: int | None = None) -> int:
    return requested or max(2 * basis.n_hermite + 8, CASE_QUADRATURE_FLOOR)


def _require_case(spec: CaseSpec, expected: CaseId) -> None:
    if spec.case is not expected:
        raise ConfigurationError(f"Generator for {expected.value} called with case {spec.case.value}")


def _projected_state(
    profile: CellProfile,
    mesh: Mesh1D,
    basis: HermiteBasisSpec,
    quadrature_order: int | None,
) -> HermiteState:
    order = case_quadrature_order(basis, quadrature_order)
    coeffs = project_cells(profile, mesh.centers, basis, order)
    return HermiteState(coeffs, basis, mesh)


def _temperature(spec: CaseSpec, x: np.ndarray) -> np.ndarray:
    T = 1.0 + spec.delta * np.cos(spec.k_x * x)
    if np.any(T <= 0):
        raise ConfigurationError(
            f"Initial temperature 1 + delta cos(k_x x) must stay positive, delta={spec.delta}",
        )
    return T


def near_equilibrium(spec: CaseSpec, mesh: Mesh1D, basis: HermiteBasisSpec) -> HermiteState:
    """Density perturbation of size delta * lam^(2 - alpha) of the global Maxwellian."""
    _require_case(spec, CaseId.NEAR_EQUILIBRIUM)
    if basis.T0 != 1.0:
        raise ConfigurationError("The near-equilibrium case is defined for T0 = 1")
    coeffs = np.zeros((basis.n_modes, mesh.n_cells))
    amplitude = spec.delta * spec.lam ** (2.0 - spec.alpha)
    coeffs[0] = 1.0 + amplitude * np.cos(spec.k_x * mesh.centers)
    return HermiteState(coeffs, basis, mesh)


def near_equilibrium_profile(spec: CaseSpec) -> CellProfile:
    amplitude = spec.delta * spec.lam ** (2.0 - spec.alpha)

    def profile(x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return (1.0 + amplitude * np.cos(spec.k_x * x)) * maxwellian(v)

    return profile


def temperature_perturbation(
    spec: CaseSpec,
    mesh: Mesh1D,
    basis: HermiteBasisSpec,
    quadrature_order: int | None = None,
) -> HermiteState:
    """Local Maxwellian with unit density and temperature 1 + delta cos(k_x x)."""
    _require_case(spec, CaseId.TEMPERATURE_PERTURBATION)
    T_cells = _temperature(spec, mesh.centers)
    logger.debug(f"Temperature range [{T_cells.min():.4g}, {T_cells.max():.4g}]")

    def profile(x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return maxwellian(v, _temperature(spec, x))

    return _projected_state(profile, mesh, basis, quadrature_order)


def oscillatory_perturbation(
    spec: CaseSpec,
    mesh: Mesh1D,
    basis: HermiteBasisSpec,
    quadrature_order: int | None = None,
) -> HermiteState:
    """Local Maxwellian modulated by 1 + delta cos(k_x x) sin(3 pi v)."""
    _require_case(spec, CaseId.OSCILLATORY_PERTURBATION)

    def profile(x: np.ndarray, v: np.ndarray) -> np.ndarray:
        T = _temperature(spec, x)
        modulation = 1.0 + spec.delta * np.cos(spec.k_x * x) * np.sin(3.0 * math.pi * v)
        return maxwellian(v, T) * modulation

    return _projected_state(profile, mesh, basis, quadrature_order)


def two_stream(
    spec: CaseSpec,
    mesh: Mesh1D,
    basis: HermiteBasisSpec,
    quadrature_order: int | None = None,
) -> HermiteState:
    """Bimodal profile (1 + 5 v^2 / T) exp(-v^2 / 2T) / (6 sqrt(2 pi T))."""
    _require_case(spec, CaseId.TWO_STREAM)

    def profile(x: np.ndarray, v: np.ndarray) -> np.ndarray:
        T = _temperature(spec, x)
        return (1.0 + 5.0 * v * v / T) * np.exp(-0.5 * v * v / T) / (6.0 * np.sqrt(2.0 * math.pi * T))

    return _projected_state(profile, mesh, basis, quadrature_order)


GENERATORS = {
    CaseId.NEAR_EQUILIBRIUM: near_equilibrium,
    CaseId.TEMPERATURE_PERTURBATION: temperature_perturbation,
    CaseId.OSCILLATORY_PERTURBATION: oscillatory_perturbation,
    CaseId.TWO_STREAM: two_stream,
}


def generate(
    spec: CaseSpec,
    mesh: Mesh1D,
    basis: HermiteBasisSpec,
    quadrature_order: int | None = None,
) -> HermiteState:
    """Initial state for any shipped case."""
    if (spec.domain[0], spec.domain[1]) != (mesh.a, mesh.b):
        raise ConfigurationError(f"Case domain {spec.domain} does not match mesh [{mesh.a}, {mesh.b}]")
    if spec.T0 != basis.T0:
        raise ConfigurationError(f"Case T0={spec.T0} does not match basis T0={basis.T0}")
    logger.info(f"Generating initial state for {spec.case.value} (delta={spec.delta:g}, lambda={spec.lam:g})")
    if spec.case is CaseId.NEAR_EQUILIBRIUM:
        return near_equilibrium(spec, mesh, basis)
    return GENERATORS[spec.case](spec, mesh, basis, quadrature_order)
