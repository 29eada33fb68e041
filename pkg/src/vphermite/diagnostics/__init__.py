"""Diagnostics: conservation, quasineutral error functionals and series analysis."""

from .analysis import SlopeFit, dominant_period, fit_slope, growth_rate, observed_orders
from .observables import (
    ConservationReport,
    DiagnosticsCollector,
    capture_reference,
    compute_record,
    conservation_report,
    e_slow,
    energy_anomaly,
    error_functionals,
    oscillatory_parts,
    potential_energy,
    reformulated_residual,
    reformulated_residual_field,
)

__all__ = [
    "ConservationReport",
    "DiagnosticsCollector",
    "SlopeFit",
    "capture_reference",
    "compute_record",
    "conservation_report",
    "dominant_period",
    "e_slow",
    "energy_anomaly",
    "error_functionals",
    "fit_slope",
    "growth_rate",
    "observed_orders",
    "oscillatory_parts",
    "potential_energy",
    "reformulated_residual",
    "reformulated_residual_field",
]
