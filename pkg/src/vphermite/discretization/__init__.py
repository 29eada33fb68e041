"""Phase-space discretization: Hermite velocity basis and periodic finite volumes."""

from .field import PoissonSolver, laplacian_matrix, poisson_solver, solve_poisson
from .grid import (
    Mesh1D,
    cell_integral,
    centered_symbol,
    d_h,
    derivative_matrix,
    l2_norm,
    norms,
    poincare_constant,
)
from .hermite import (
    Moments,
    QuadratureRule,
    default_quadrature_order,
    eval_basis,
    maxwellian,
    moments,
    project,
    project_cells,
    quadrature_rule,
    reconstruct,
)

__all__ = [
    "Mesh1D",
    "Moments",
    "PoissonSolver",
    "QuadratureRule",
    "cell_integral",
    "centered_symbol",
    "d_h",
    "default_quadrature_order",
    "derivative_matrix",
    "eval_basis",
    "l2_norm",
    "laplacian_matrix",
    "maxwellian",
    "moments",
    "norms",
    "poincare_constant",
    "poisson_solver",
    "project",
    "project_cells",
    "quadrature_rule",
    "reconstruct",
    "solve_poisson",
]
