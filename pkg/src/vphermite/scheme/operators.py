"""Implicit linear step operator and the explicit-in-k nonlinear stage.

Unknowns of the linear system are ordered mode-major (all cells of C_0,
then C_1, ...), followed by the potential and one zero-mean multiplier.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Hashable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..core.exceptions import SolverError
from ..core.models import FieldSolution, HermiteBasisSpec, HermiteState, SchemeConfig
from ..discretization.grid import Mesh1D, d_h, derivative_matrix

logger = logging.getLogger(__name__)


def hermite_transport_matrix(basis: HermiteBasisSpec) -> sp.csr_matrix:
    """Tridiagonal coupling A[k, k-1] = sqrt(k T0), A[k, k+1] = sqrt((k+1) T0)."""
    k = np.arange(1, basis.n_modes, dtype=float)
    off = np.sqrt(k * basis.T0)
    return sp.diags([off, off], offsets=[-1, 1], format="csr")


class LinearStepOperator:
    """Factorized system for C + sub_dt * L(C, phi) = rhs coupled to Poisson.

    The unknowns are the deviation ``U = C - C_stat`` from the quasineutral
    steady state ``C_stat = (1, 0, ..., 0)``, so every row is homogeneous and
    ``C_stat`` is mapped to itself without round-off. Rows per cell ``j``:
      * mode ``k``: U_k + sub_dt (sqrt(k T0) d_h U_{k-1} + sqrt((k+1) T0) d_h U_{k+1})
        (plus ``- sub_dt / sqrt(T0) * E`` for ``k = 1``, with ``E = -d_h phi``)
      * Poisson: -U_0 - lam^2 d_h d_h phi + mu dx_j = 0
      * zero mean: sum_j dx_j phi_j = 0
    """

    def __init__(self, mesh: Mesh1D, basis: HermiteBasisSpec, lam: float, sub_dt: float):
        mesh.require_odd()
        self.mesh = mesh
        self.basis = basis
        self.lam = float(lam)
        self.sub_dt = float(sub_dt)
        self.matrix = self._assemble()
        try:
            self._lu = spla.splu(self.matrix)
        except RuntimeError as e:
            raise SolverError(f"Factorization of the linear step failed: {e}", self.key) from e
        logger.info(
            f"Factorized linear step operator: {self.matrix.shape[0]} unknowns, "
            f"nnz={self.matrix.nnz}, sub_dt={self.sub_dt:g}, lambda={self.lam:g}",
        )

    @property
    def key(self) -> tuple[Hashable, ...]:
        return operator_key(self.sub_dt, self.lam, self.mesh, self.basis)

    @property
    def n_unknowns(self) -> int:
        return self.basis.n_modes * self.mesh.n_cells + self.mesh.n_cells + 1

    def _assemble(self) -> sp.csc_matrix:
        n = self.mesh.n_cells
        m = self.basis.n_modes
        D = derivative_matrix(self.mesh)
        identity = sp.identity(m * n, format="csr")

        transport = identity + self.sub_dt * sp.kron(
            hermite_transport_matrix(self.basis), D, format="csr",
        )
        selector_k1 = sp.csr_matrix(([1.0], ([1], [0])), shape=(m, 1))
        field_coupling = sp.kron(
            selector_k1, (self.sub_dt / math.sqrt(self.basis.T0)) * D, format="csr",
        )
        density = sp.hstack(
            [-sp.identity(n, format="csr"), sp.csr_matrix((n, (m - 1) * n))],
            format="csr",
        )
        laplacian = -(self.lam**2) * (D @ D)
        dx_col = sp.csr_matrix(self.mesh.widths[:, np.newaxis])

        return sp.bmat(
            [
                [transport, field_coupling, None],
                [density, laplacian, dx_col],
                [None, dx_col.T, None],
            ],
            format="csc",
        )

    def rhs_vector(self, coeffs: np.ndarray) -> np.ndarray:
        """Right-hand side for the deviation unknowns."""
        deviation = np.array(coeffs, dtype=float)
        deviation[0] -= 1.0
        n = self.mesh.n_cells
        return np.concatenate([deviation.ravel(), np.zeros(n + 1)])

    def split_solution(self, solution: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = self.mesh.n_cells
        m = self.basis.n_modes
        coeffs = solution[: m * n].reshape(m, n)
        phi = solution[m * n : m * n + n]
        return coeffs, phi

    def solve(
        self, rhs_coeffs: np.ndarray, check_finite: bool = True,
    ) -> tuple[np.ndarray, FieldSolution]:
        """Solve for (C, phi) given the mode right-hand side; returns raw coefficients."""
        expected = (self.basis.n_modes, self.mesh.n_cells)
        if np.shape(rhs_coeffs) != expected:
            raise ValueError(f"Right-hand side has shape {np.shape(rhs_coeffs)}, expected {expected}")
        solution = self._lu.solve(self.rhs_vector(rhs_coeffs))
        if check_finite and not np.all(np.isfinite(solution)):
            raise SolverError("Linear step produced non-finite values", self.key)
        deviation, phi = self.split_solution(solution)
        coeffs = deviation.copy()
        coeffs[0] += 1.0
        field = FieldSolution(phi=phi.copy(), E=-d_h(phi, self.mesh), lam=self.lam)
        return coeffs, field


def operator_key(
    sub_dt: float, lam: float, mesh: Mesh1D, basis: HermiteBasisSpec,
) -> tuple[Hashable, ...]:
    return (float(sub_dt), float(lam), mesh.key, basis.n_hermite, basis.T0)


class OperatorCache:
    """Per-run store of factorized linear step operators."""

    def __init__(self) -> None:
        self._operators: dict[tuple[Hashable, ...], LinearStepOperator] = {}

    def __len__(self) -> int:
        return len(self._operators)

    def get(
        self, mesh: Mesh1D, basis: HermiteBasisSpec, lam: float, sub_dt: float,
    ) -> LinearStepOperator:
        key = operator_key(sub_dt, lam, mesh, basis)
        operator = self._operators.get(key)
        if operator is None:
            operator = LinearStepOperator(mesh, basis, lam, sub_dt)
            self._operators[key] = operator
        else:
            logger.debug(f"Reusing cached linear operator for sub_dt={sub_dt:g}")
        return operator

    def clear(self) -> None:
        self._operators.clear()


def assemble_linear(
    cfg: SchemeConfig, sub_dt: float, cache: OperatorCache | None = None,
) -> LinearStepOperator:
    """Linear step operator for ``cfg`` at effective step ``sub_dt``."""
    if cache is None:
        return LinearStepOperator(cfg.mesh, cfg.basis, cfg.lam, sub_dt)
    return cache.get(cfg.mesh, cfg.basis, cfg.lam, sub_dt)


def linear_step(
    state: HermiteState,
    sub_dt: float,
    lam: float,
    cache: OperatorCache | None = None,
) -> tuple[HermiteState, FieldSolution]:
    """Implicit Euler step of the linearized transport-Poisson system."""
    if cache is None:
        operator = LinearStepOperator(state.mesh, state.basis, lam, sub_dt)
    else:
        operator = cache.get(state.mesh, state.basis, lam, sub_dt)
    coeffs, field = operator.solve(state.coeffs)
    return state.with_coeffs(coeffs), field


def nonlinear_stage(
    rhs: np.ndarray, E: np.ndarray, coef: float, T0: float,
) -> np.ndarray:
    """Solve Y + coef * B(Y) = rhs, with B_k(Y) = -sqrt(k/T0) E (Y_{k-1} - delta_{k1}).

    B is strictly lower triangular in k, so the solve is a forward recursion.
    """
    rhs = np.asarray(rhs, dtype=float)
    out = np.empty_like(rhs)
    out[0] = rhs[0]
    for k in range(1, rhs.shape[0]):
        source = out[k - 1] - 1.0 if k == 1 else out[k - 1]
        out[k] = rhs[k] + coef * math.sqrt(k / T0) * E * source
    return out


def nonlinear_step(state: HermiteState, E: np.ndarray, sub_dt: float) -> HermiteState:
    """Second split step: C_0 and E frozen, C_k updated sequentially in k."""
    E = np.asarray(E, dtype=float)
    if E.shape != (state.n_cells,):
        raise ValueError(f"Field has shape {E.shape}, expected ({state.n_cells},)")
    coeffs = nonlinear_stage(state.coeffs, E, sub_dt, state.basis.T0)
    return state.with_coeffs(coeffs)
