"""Core vphermite module: models, errors and configuration."""

from .config import apply_overrides, list_presets, load_config, load_preset, parse_config
from .exceptions import (
    ConfigurationError,
    DivergenceError,
    ObserverError,
    OutputError,
    SolvabilityError,
    SolverError,
    VPHermiteError,
)
from .models import (
    GAMMA,
    CaseId,
    CaseSpec,
    DiagnosticsRecord,
    ErrorMode,
    ExperimentConfig,
    FieldSolution,
    HermiteBasisSpec,
    HermiteState,
    OperatorKind,
    OscillationReference,
    RunOutcome,
    RunSummary,
    SchemeConfig,
)

__all__ = [
    "GAMMA",
    "CaseId",
    "CaseSpec",
    "ConfigurationError",
    "DiagnosticsRecord",
    "DivergenceError",
    "ErrorMode",
    "ExperimentConfig",
    "FieldSolution",
    "HermiteBasisSpec",
    "HermiteState",
    "ObserverError",
    "OperatorKind",
    "OscillationReference",
    "OutputError",
    "RunOutcome",
    "RunSummary",
    "SchemeConfig",
    "SolvabilityError",
    "SolverError",
    "VPHermiteError",
    "apply_overrides",
    "list_presets",
    "load_config",
    "load_preset",
    "parse_config",
]
