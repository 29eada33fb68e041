"""Shipped initial conditions."""

from .generators import (
    GENERATORS,
    case_quadrature_order,
    generate,
    near_equilibrium,
    near_equilibrium_profile,
    oscillatory_perturbation,
    temperature_perturbation,
    two_stream,
)

__all__ = [
    "GENERATORS",
    "case_quadrature_order",
    "generate",
    "near_equilibrium",
    "near_equilibrium_profile",
    "oscillatory_perturbation",
    "temperature_perturbation",
    "two_stream",
]
