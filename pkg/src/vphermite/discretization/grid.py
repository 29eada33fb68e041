"""Periodic 1D finite-volume mesh and the centered difference operator."""

from __future__ import annotations

import logging
import math
from functools import cached_property

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from ..core.exceptions import ConfigurationError

logger = logging.getLogger(__name__)


class Mesh1D:
    """Immutable periodic mesh of ``n_cells`` control volumes on ``[a, b]``.

    Meshes compare and hash by value so they can key operator caches.
    """

    periodic = True

    def __init__(self, a: float, b: float, widths: np.ndarray):
        widths = np.array(widths, dtype=float)
        if widths.ndim != 1 or widths.size < 3:
            raise ConfigurationError("A mesh needs at least three cells")
        if not a < b:
            raise ConfigurationError(f"Mesh endpoints must satisfy a < b, got ({a}, {b})")
        if np.any(widths <= 0) or not np.all(np.isfinite(widths)):
            raise ConfigurationError("Cell widths must be positive and finite")
        length = b - a
        if abs(widths.sum() - length) > 1e-12 * max(1.0, length):
            raise ConfigurationError(
                f"Cell widths sum to {widths.sum():.15g}, expected b - a = {length:.15g}",
            )
        widths.setflags(write=False)
        self.a = float(a)
        self.b = float(b)
        self.widths = widths
        centers = a + np.cumsum(widths) - 0.5 * widths
        centers.setflags(write=False)
        self.centers = centers

    @classmethod
    def uniform(cls, a: float, b: float, n_cells: int) -> Mesh1D:
        """Uniform mesh with ``n_cells`` cells of width (b - a)/n_cells."""
        if n_cells < 3:
            raise ConfigurationError(f"n_cells must be >= 3, got {n_cells}")
        return cls(a, b, np.full(n_cells, (b - a) / n_cells))

    @classmethod
    def from_edges(cls, edges: np.ndarray) -> Mesh1D:
        """Mesh from explicit, strictly increasing cell edges."""
        edges = np.asarray(edges, dtype=float)
        if edges.ndim != 1 or edges.size < 4:
            raise ConfigurationError("At least four edges (three cells) are required")
        widths = np.diff(edges)
        if np.any(widths <= 0):
            raise ConfigurationError("Cell edges must be strictly increasing")
        return cls(edges[0], edges[-1], widths)

    @property
    def n_cells(self) -> int:
        return int(self.widths.size)

    @property
    def length(self) -> float:
        return self.b - self.a

    @cached_property
    def uniform_flag(self) -> bool:
        return bool(np.ptp(self.widths) <= 1e-14 * self.widths.max())

    @property
    def h(self) -> float:
        """Largest cell width."""
        return float(self.widths.max())

    @property
    def regularity(self) -> float:
        """Mesh-regularity ratio max dx_i / min dx_j."""
        return float(self.widths.max() / self.widths.min())

    @cached_property
    def key(self) -> tuple[float, float, int, bytes]:
        return (self.a, self.b, self.n_cells, self.widths.tobytes())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mesh1D):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        kind = "uniform" if self.uniform_flag else "non-uniform"
        return f"Mesh1D([{self.a}, {self.b}], n_cells={self.n_cells}, {kind})"

    def require_odd(self) -> None:
        """Reject meshes whose centered stencil has a checkerboard kernel."""
        if self.n_cells % 2 == 0:
            raise ConfigurationError(
                f"n_cells={self.n_cells} is even: the centered difference operator then "
                "annihilates the checkerboard mode as well as constants, so the discrete "
                "Poisson operator is singular. Use an odd number of cells.",
            )


def d_h(values: np.ndarray, mesh: Mesh1D) -> np.ndarray:
    """Centered periodic difference (u_{j+1} - u_{j-1}) / (2 dx_j) along the last axis."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != mesh.n_cells:
        raise ValueError(
            f"Field has {values.shape[-1]} cells, mesh has {mesh.n_cells}",
        )
    return (np.roll(values, -1, axis=-1) - np.roll(values, 1, axis=-1)) / (2.0 * mesh.widths)


def derivative_matrix(mesh: Mesh1D) -> sp.csr_matrix:
    """Sparse matrix of ``d_h``."""
    n = mesh.n_cells
    rows = np.arange(n)
    inv = 1.0 / (2.0 * mesh.widths)
    data = np.concatenate([inv, -inv])
    cols = np.concatenate([(rows + 1) % n, (rows - 1) % n])
    return sp.csr_matrix((data, (np.concatenate([rows, rows]), cols)), shape=(n, n))


def cell_integral(values: np.ndarray, mesh: Mesh1D) -> float:
    """Sum of dx_j * u_j."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != mesh.n_cells:
        raise ValueError(f"Field has {values.shape[-1]} cells, mesh has {mesh.n_cells}")
    return float(np.dot(mesh.widths, values))


def l2_norm(values: np.ndarray, mesh: Mesh1D) -> float:
    values = np.asarray(values, dtype=float)
    return float(math.sqrt(np.dot(mesh.widths, values * values)))


def norms(values: np.ndarray, mesh: Mesh1D, r: int = 1) -> tuple[float, float]:
    """Discrete l2 norm and h^r norm (sum of l2 norms of d_h^s u for s <= r)."""
    if r < 0:
        raise ValueError(f"Norm order must be >= 0, got {r}")
    current = np.asarray(values, dtype=float)
    l2 = l2_norm(current, mesh)
    total = l2 * l2
    for _ in range(r):
        current = d_h(current, mesh)
        total += l2_norm(current, mesh) ** 2
    return l2, math.sqrt(total)


def centered_symbol(k: float, dx: float) -> float:
    """Fourier symbol sin(k dx)/dx of ``d_h`` on a uniform mesh."""
    return math.sin(k * dx) / dx


def poincare_constant(mesh: Mesh1D) -> float:
    """Smallest C with ||u|| <= C ||d_h u|| on zero-mean vectors, in the weighted l2 norm.

    Dense computation, meant for small meshes.
    """
    mesh.require_odd()
    sqrt_w = np.sqrt(mesh.widths)
    weighted = np.diag(sqrt_w) @ derivative_matrix(mesh).toarray() @ np.diag(1.0 / sqrt_w)
    # zero-mean subspace in the weighted coordinates is orthogonal to sqrt(dx)
    basis = sla.null_space(sqrt_w[np.newaxis, :])
    restricted = weighted @ basis
    eigvals = sla.eigh(restricted.T @ restricted, eigvals_only=True)
    smallest = float(eigvals[0])
    if smallest <= 0:
        raise ConfigurationError("d_h is singular on zero-mean vectors for this mesh")
    logger.debug(f"Poincare constant for {mesh}: {1.0 / math.sqrt(smallest):.6g}")
    return 1.0 / math.sqrt(smallest)
