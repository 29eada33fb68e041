"""Implicit splitting integrators for the Hermite-moment system."""

from .integrators import (
    Observer,
    SplittingIntegrator,
    StepSnapshot,
    Trajectory,
    lie_step,
    run,
    sdirk2,
    sdirk2_substep,
    strang_step,
)
from .operators import (
    LinearStepOperator,
    OperatorCache,
    assemble_linear,
    hermite_transport_matrix,
    linear_step,
    nonlinear_stage,
    nonlinear_step,
)

__all__ = [
    "LinearStepOperator",
    "Observer",
    "OperatorCache",
    "SplittingIntegrator",
    "StepSnapshot",
    "Trajectory",
    "assemble_linear",
    "hermite_transport_matrix",
    "lie_step",
    "linear_step",
    "nonlinear_stage",
    "nonlinear_step",
    "run",
    "sdirk2",
    "sdirk2_substep",
    "strang_step",
]
