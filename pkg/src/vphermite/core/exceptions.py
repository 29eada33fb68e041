"""Exception hierarchy for vphermite."""

from __future__ import annotations

from typing import Any


class VPHermiteError(Exception):
    """Base class for all vphermite errors."""


class ConfigurationError(VPHermiteError, ValueError):
    """Invalid simulation or experiment parameters."""


class SolvabilityError(VPHermiteError, ValueError):
    """Poisson right-hand side is not charge neutral."""


class SolverError(VPHermiteError, RuntimeError):
    """Sparse factorization or solve failed."""

    def __init__(self, message: str, cache_key: Any = None):
        super().__init__(f"{message} (operator key: {cache_key})")
        self.cache_key = cache_key


class DivergenceError(VPHermiteError, RuntimeError):
    """State became non-finite or exceeded the divergence threshold."""

    def __init__(self, step: int, t: float, norm: float):
        super().__init__(
            f"Simulation diverged at step {step} (t={t:.6g}, max |C|={norm:.3e})",
        )
        self.step = step
        self.t = t
        self.norm = norm


class ObserverError(VPHermiteError, RuntimeError):
    """An observer raised while processing a step."""

    def __init__(self, step: int, message: str):
        super().__init__(f"Observer failed at step {step}: {message}")
        self.step = step


class OutputError(VPHermiteError, OSError):
    """Persisting run artifacts failed."""
