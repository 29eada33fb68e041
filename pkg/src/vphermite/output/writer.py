"""Persistence of run artifacts: diagnostics CSV, distribution snapshots, metadata."""

from __future__ import annotations

import csv
import json
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from ..core.exceptions import OutputError
from ..core.models import DiagnosticsRecord
from ..discretization.hermite import eval_basis, reconstruct
from ..scheme.integrators import StepSnapshot

logger = logging.getLogger(__name__)

PARTIAL_MARKER = ".partial"
DIAGNOSTICS_FILE = "diagnostics.csv"
METADATA_FILE = "metadata.json"


def format_value(value: Any) -> str:
    """Shortest round-trip text for floats, plain ``str`` otherwise."""
    if isinstance(value, float | np.floating):
        return repr(float(value))
    return str(value)


class RunWriter:
    """Writes the artifacts of one run into its own directory.

    A ``.partial`` marker exists from creation until :meth:`finalize`; a
    directory still holding it after the process exits is incomplete.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            self.marker.write_text("incomplete run\n")
        except OSError as e:
            raise OutputError(f"Cannot prepare output directory {self.directory}: {e}") from e
        logger.info(f"Writing run output to {self.directory}")

    @property
    def marker(self) -> Path:
        return self.directory / PARTIAL_MARKER

    def write_table(
        self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]],
    ) -> Path:
        path = self.directory / name
        try:
            with path.open("w", newline="") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([format_value(v) for v in row])
        except OSError as e:
            raise OutputError(f"Failed to write {path}: {e}") from e
        logger.debug(f"Wrote {path}")
        return path

    def write_diagnostics(self, records: Sequence[DiagnosticsRecord]) -> Path:
        return self.write_table(
            DIAGNOSTICS_FILE, DiagnosticsRecord.CSV_COLUMNS, (r.as_row() for r in records),
        )

    def write_matrix(self, name: str, matrix: np.ndarray) -> Path:
        path = self.directory / name
        try:
            np.savetxt(path, np.atleast_1d(matrix), fmt="%.17g")
        except OSError as e:
            raise OutputError(f"Failed to write {path}: {e}") from e
        return path

    def write_metadata(self, metadata: dict[str, Any]) -> Path:
        path = self.directory / METADATA_FILE
        try:
            path.write_text(json.dumps(_jsonable(metadata), indent=2, sort_keys=True) + "\n")
        except OSError as e:
            raise OutputError(f"Failed to write {path}: {e}") from e
        return path

    def finalize(self) -> None:
        try:
            self.marker.unlink(missing_ok=True)
        except OSError as e:
            raise OutputError(f"Cannot remove {self.marker}: {e}") from e
        logger.info(f"Run output complete in {self.directory}")


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if hasattr(value, "value") and isinstance(value.value, str):  # enums
        return value.value
    return value


class SnapshotRecorder:
    """Observer writing f (or f - M) on a velocity grid at requested times.

    Each requested time is mapped to the nearest time level.
    """

    def __init__(
        self,
        writer: RunWriter,
        times: Sequence[float],
        dt: float,
        n_steps: int,
        v_grid: np.ndarray,
        deviation: bool = False,
    ):
        self.writer = writer
        self.v_grid = np.asarray(v_grid, dtype=float)
        self.deviation = deviation
        self.targets: dict[int, float] = {}
        for time in sorted(times):
            level = min(max(round(time / dt), 0), n_steps)
            self.targets.setdefault(level, time)
        self.written: list[Path] = []
        self._axes_written = False

    def __call__(self, snapshot: StepSnapshot) -> None:
        if snapshot.n not in self.targets:
            return
        state = snapshot.state
        if not self._axes_written:
            self.writer.write_matrix("x.txt", state.mesh.centers)
            self.writer.write_matrix("v.txt", self.v_grid)
            self._axes_written = True
        f = reconstruct(state, self.v_grid)
        if self.deviation:
            f = f - eval_basis(self.v_grid, state.basis)[0][np.newaxis, :]
        name = f"snapshot_{len(self.written):03d}_t{snapshot.t:.6g}.txt"
        self.written.append(self.writer.write_matrix(name, f))
        logger.info(f"Wrote snapshot at t={snapshot.t:.6g} to {name}")
