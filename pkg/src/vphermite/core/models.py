"""Data models and enums for vphermite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import ConfigurationError

if TYPE_CHECKING:
    from ..discretization.grid import Mesh1D

# Diagonal coefficient of the two-stage stiffly accurate SDIRK method.
GAMMA = 1.0 - 1.0 / math.sqrt(2.0)

SCHEMA_VERSION = 1

DIVERGENCE_THRESHOLD = 1e8


class CaseId(str, Enum):
    """Initial conditions shipped with the simulator."""

    NEAR_EQUILIBRIUM = "near_equilibrium"
    TEMPERATURE_PERTURBATION = "temperature_perturbation"
    OSCILLATORY_PERTURBATION = "oscillatory_perturbation"
    TWO_STREAM = "two_stream"


class ErrorMode(str, Enum):
    """Which pair of error functionals to evaluate."""

    CONTINUOUS = "continuous"  # oscillations subtracted explicitly
    DISCRETE = "discrete"  # oscillations expected to be filtered by the scheme


class OperatorKind(str, Enum):
    """Split flows advanced by an SDIRK sub-step."""

    LINEAR = "linear"
    NONLINEAR = "nonlinear"


class RunOutcome(str, Enum):
    """Terminal state of a simulation."""

    COMPLETED = "completed"
    DIVERGED = "diverged"


@dataclass(frozen=True)
class HermiteBasisSpec:
    """Hermite basis around the Maxwellian of temperature ``T0``.

    Modes ``0..n_hermite`` are retained.
    """

    T0: float = 1.0
    n_hermite: int = 32

    def __post_init__(self) -> None:
        if not (self.T0 > 0 and math.isfinite(self.T0)):
            raise ConfigurationError(f"T0 must be positive, got {self.T0}")
        if self.n_hermite < 2:
            raise ConfigurationError(
                f"n_hermite must be >= 2 (the flux equation couples to C_2), got {self.n_hermite}",
            )

    @property
    def n_modes(self) -> int:
        return self.n_hermite + 1


@dataclass(frozen=True, eq=False)
class HermiteState:
    """Hermite coefficients ``C[k, j]`` for mode ``k`` and cell ``j``."""

    coeffs: np.ndarray
    basis: HermiteBasisSpec
    mesh: Mesh1D

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=float)
        expected = (self.basis.n_modes, self.mesh.n_cells)
        if coeffs.shape != expected:
            raise ValueError(
                f"Coefficient matrix has shape {coeffs.shape}, expected {expected}",
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Hermite coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def equilibrium(cls, basis: HermiteBasisSpec, mesh: Mesh1D) -> HermiteState:
        """Quasineutral steady state C = (1, 0, ..., 0) in every cell."""
        coeffs = np.zeros((basis.n_modes, mesh.n_cells))
        coeffs[0] = 1.0
        return cls(coeffs, basis, mesh)

    def with_coeffs(self, coeffs: np.ndarray) -> HermiteState:
        return HermiteState(coeffs, self.basis, self.mesh)

    @property
    def n_modes(self) -> int:
        return self.basis.n_modes

    @property
    def n_cells(self) -> int:
        return self.mesh.n_cells


@dataclass(frozen=True, eq=False)
class FieldSolution:
    """Discrete potential and electric field for a Debye parameter ``lam``."""

    phi: np.ndarray
    E: np.ndarray
    lam: float


@dataclass(frozen=True)
class CaseSpec:
    """Parameters of one initial condition."""

    case: CaseId
    delta: float
    alpha: float
    k_x: float
    domain: tuple[float, float]
    lam: float
    T0: float = 1.0

    def __post_init__(self) -> None:
        a, b = self.domain
        if not a < b:
            raise ConfigurationError(f"Domain must satisfy a < b, got {self.domain}")
        if self.delta < 0:
            raise ConfigurationError(f"delta must be >= 0, got {self.delta}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.lam <= 0:
            raise ConfigurationError(f"lambda must be positive, got {self.lam}")
        periods = self.k_x * (b - a) / (2.0 * math.pi)
        if abs(periods - round(periods)) > 1e-9:
            raise ConfigurationError(
                f"k_x * (b - a) must be a multiple of 2*pi for periodic data, got {periods:.6g} periods",
            )


@dataclass(frozen=True, eq=False)
class SchemeConfig:
    """Time-integration parameters for one simulation."""

    dt: float
    t_final: float
    order: int
    lam: float
    mesh: Mesh1D
    basis: HermiteBasisSpec
    gamma: float = GAMMA

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.t_final < 0:
            raise ConfigurationError(f"t_final must be >= 0, got {self.t_final}")
        if self.order not in (1, 2):
            raise ConfigurationError(f"order must be 1 or 2, got {self.order}")
        if not self.lam > 0:
            raise ConfigurationError(f"lambda must be positive, got {self.lam}")
        if abs(self.gamma - GAMMA) > 1e-15:
            raise ConfigurationError(f"gamma is fixed to 1 - 1/sqrt(2), got {self.gamma}")

    @property
    def n_hermite(self) -> int:
        return self.basis.n_hermite

    @property
    def T0(self) -> float:
        return self.basis.T0

    @property
    def n_steps(self) -> int:
        """Number of steps needed to reach ``t_final`` (ceil of t_final/dt)."""
        if self.t_final == 0:
            return 0
        return math.ceil(self.t_final / self.dt - 1e-9)


@dataclass(frozen=True, eq=False)
class OscillationReference:
    """Initial snapshot of ``E - E_slow`` and ``C_1`` driving the oscillatory parts."""

    e_minus_slow: np.ndarray
    c1: np.ndarray
    lam: float
    T0: float


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Scalar observables for one time level."""

    t: float
    potential_energy: float
    mass: float
    flux: float
    total_energy: float
    err0_cont: float
    err1_cont: float
    err0_disc: float
    err1_disc: float
    reformulated_residual: float
    e_norm: float
    e_slow_norm: float
    t_over_lambda: float

    CSV_COLUMNS = (
        "t",
        "potential_energy",
        "mass",
        "flux",
        "total_energy",
        "err0_cont",
        "err1_cont",
        "err0_disc",
        "err1_disc",
        "reformulated_residual",
        "e_norm",
        "e_slow_norm",
        "t_over_lambda",
    )

    def as_row(self) -> list[float]:
        return [getattr(self, name) for name in self.CSV_COLUMNS]


@dataclass
class RunSummary:
    """Outcome of a single simulation."""

    outcome: RunOutcome
    steps: int
    t_end: float
    lam: float
    dt: float
    max_err0_cont: float = 0.0
    max_err1_cont: float = 0.0
    sup_err0_disc: float = 0.0  # over n >= 1
    sup_err1_disc: float = 0.0  # over n >= 2
    max_reformulated_residual: float = float("nan")
    mass_drift: float = 0.0
    max_abs_flux: float = 0.0
    energy_anomaly: bool = False
    oscillation_period: float | None = None
    growth_rate: float | None = None
    failure: str | None = None
    output_dir: str | None = None
    extras: dict[str, Any] = field(default_factory=dict)


# --------------------------------------------------------------------------
# Experiment configuration (validated from TOML)
# --------------------------------------------------------------------------

CASE_DEFAULTS: dict[CaseId, dict[str, Any]] = {
    CaseId.NEAR_EQUILIBRIUM: {
        "delta": 0.1,
        "k_x": math.pi / 10.0,
        "domain": (-10.0, 10.0),
    },
    CaseId.TEMPERATURE_PERTURBATION: {
        "delta": 0.1,
        "k_x": math.pi / 10.0,
        "domain": (-10.0, 10.0),
    },
    CaseId.OSCILLATORY_PERTURBATION: {
        "delta": 0.05,
        "k_x": math.pi / 10.0,
        "domain": (-10.0, 10.0),
    },
    CaseId.TWO_STREAM: {
        "delta": 0.01,
        "k_x": math.pi / 6.0,
        "domain": (-6.0, 6.0),
    },
}


class CaseSettings(BaseModel):
    """``[case]`` section."""

    model_config = ConfigDict(extra="forbid")

    id: CaseId
    delta: float | None = Field(default=None, ge=0)
    alpha: float = Field(default=0.0, ge=0, le=1)
    k_x: float | None = Field(default=None, gt=0)
    domain: tuple[float, float] | None = None

    @model_validator(mode="after")
    def apply_case_defaults(self) -> CaseSettings:
        defaults = CASE_DEFAULTS[self.id]
        if self.delta is None:
            self.delta = defaults["delta"]
        if self.k_x is None:
            self.k_x = defaults["k_x"]
        if self.domain is None:
            self.domain = defaults["domain"]
        if not self.domain[0] < self.domain[1]:
            raise ValueError(f"domain must satisfy a < b, got {self.domain}")
        return self


class SchemeSettings(BaseModel):
    """``[scheme]`` section."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    lam: float = Field(alias="lambda", gt=0)
    dt: float = Field(gt=0)
    t_final: float = Field(ge=0)
    order: Literal[1, 2] = 2
    n_hermite: int = Field(default=32, ge=2)
    n_cells: int = Field(default=129, ge=3)
    T0: float = Field(default=1.0, gt=0)
    quadrature_order: int | None = Field(default=None, ge=2)

    @field_validator("n_cells")
    @classmethod
    def require_odd_cells(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(
                f"n_cells={value} is even: the centered stencil then has a two-dimensional "
                "kernel (constants plus the checkerboard mode) and the Poisson operator is "
                "singular. Use an odd number of cells.",
            )
        return value


class SweepSettings(BaseModel):
    """``[sweep]`` section; empty lists fall back to the single-run values."""

    model_config = ConfigDict(extra="forbid")

    lambdas: list[float] = Field(default_factory=list)
    alphas: list[float] = Field(default_factory=list)
    dts: list[float] = Field(default_factory=list)
    dt_max: float = Field(default=0.01, gt=0)
    steps_per_lambda: float = Field(default=50.0, gt=0)
    reference_dt: float | None = Field(default=None, gt=0)

    @field_validator("lambdas", "dts")
    @classmethod
    def require_positive(cls, values: list[float]) -> list[float]:
        if any(v <= 0 for v in values):
            raise ValueError(f"all values must be positive, got {values}")
        return values

    @field_validator("alphas")
    @classmethod
    def require_unit_interval(cls, values: list[float]) -> list[float]:
        if any(not 0 <= v <= 1 for v in values):
            raise ValueError(f"alpha values must lie in [0, 1], got {values}")
        return values


class VGridSettings(BaseModel):
    """Velocity grid used for distribution snapshots."""

    model_config = ConfigDict(extra="forbid")

    v_min: float = -6.0
    v_max: float = 6.0
    n: int = Field(default=201, ge=2)

    @model_validator(mode="after")
    def check_range(self) -> VGridSettings:
        if not self.v_min < self.v_max:
            raise ValueError("v_min must be smaller than v_max")
        return self


class OutputSettings(BaseModel):
    """``[output]`` section."""

    model_config = ConfigDict(extra="forbid")

    directory: str = "runs/default"
    snapshot_times: list[float] = Field(default_factory=list)
    snapshot_deviation: bool = False
    v_grid: VGridSettings = Field(default_factory=VGridSettings)
    reference: bool = False


class ExperimentConfig(BaseModel):
    """Complete, validated experiment description."""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    name: str = "experiment"
    description: str = ""
    case: CaseSettings
    scheme: SchemeSettings
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @property
    def sweep_lambdas(self) -> list[float]:
        return self.sweep.lambdas or [self.scheme.lam]

    @property
    def sweep_alphas(self) -> list[float]:
        return self.sweep.alphas or [self.case.alpha]
