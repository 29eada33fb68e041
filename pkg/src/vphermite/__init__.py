"""vphermite - Hermite-moment Vlasov-Poisson simulator.

Asymptotic-preserving implicit splitting schemes for the 1D-1V
Vlasov-Poisson system near the quasineutral limit, with the diagnostics
needed to check convergence rates and discrete conservation.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .core.config import load_config, load_preset
from .core.experiment import Experiment
from .core.models import CaseId, ExperimentConfig, HermiteBasisSpec, HermiteState

__all__ = [
    "CaseId",
    "Experiment",
    "ExperimentConfig",
    "HermiteBasisSpec",
    "HermiteState",
    "load_config",
    "load_preset",
]
