"""Discrete Poisson solve -lambda^2 d_h(d_h phi) = C0 - 1 with zero-mean potential."""

from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..core.exceptions import ConfigurationError, SolvabilityError, SolverError
from ..core.models import FieldSolution
from .grid import Mesh1D, cell_integral, d_h, derivative_matrix

logger = logging.getLogger(__name__)

NEUTRALITY_TOLERANCE = 1e-10


def laplacian_matrix(mesh: Mesh1D) -> sp.csr_matrix:
    """Wide-stencil Laplacian d_h o d_h."""
    D = derivative_matrix(mesh)
    return (D @ D).tocsr()


class PoissonSolver:
    """Factorized zero-mean Poisson operator for one (mesh, lambda) pair.

    The potential is pinned by a Lagrange multiplier: the system
    ``[[-lam^2 D^2, dx], [dx^T, 0]]`` is square and nonsingular for odd
    cell counts.
    """

    def __init__(self, mesh: Mesh1D, lam: float):
        if lam <= 0:
            raise ConfigurationError(f"lambda must be positive, got {lam}")
        mesh.require_odd()
        self.mesh = mesh
        self.lam = float(lam)

        dx = sp.csr_matrix(mesh.widths[:, np.newaxis])
        matrix = sp.bmat(
            [[-(lam**2) * laplacian_matrix(mesh), dx], [dx.T, None]],
            format="csc",
        )
        try:
            self._lu = spla.splu(matrix)
        except RuntimeError as e:
            raise SolverError(f"Poisson factorization failed: {e}", (mesh.key, lam)) from e
        logger.debug(f"Factorized Poisson operator for {mesh}, lambda={lam:g}")

    def solve(self, C0: np.ndarray) -> FieldSolution:
        C0 = np.asarray(C0, dtype=float)
        if C0.shape != (self.mesh.n_cells,):
            raise ValueError(f"C0 has shape {C0.shape}, expected ({self.mesh.n_cells},)")
        source = C0 - 1.0
        imbalance = cell_integral(source, self.mesh)
        if abs(imbalance) > NEUTRALITY_TOLERANCE * max(1.0, self.mesh.length):
            raise SolvabilityError(
                f"Charge is not neutral: sum(dx * (C0 - 1)) = {imbalance:.3e}",
            )
        rhs = np.append(source, 0.0)
        solution = self._lu.solve(rhs)
        if not np.all(np.isfinite(solution)):
            raise SolverError("Poisson solve produced non-finite values", (self.mesh.key, self.lam))
        phi = solution[:-1]
        return FieldSolution(phi=phi, E=-d_h(phi, self.mesh), lam=self.lam)


@lru_cache(maxsize=16)
def poisson_solver(mesh: Mesh1D, lam: float) -> PoissonSolver:
    return PoissonSolver(mesh, lam)


def solve_poisson(C0: np.ndarray, lam: float, mesh: Mesh1D) -> FieldSolution:
    """Potential and field for density ``C0``; factorization is cached per (mesh, lambda)."""
    return poisson_solver(mesh, float(lam)).solve(C0)
