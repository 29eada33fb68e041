"""Run artifact persistence."""

from .writer import DIAGNOSTICS_FILE, METADATA_FILE, PARTIAL_MARKER, RunWriter, SnapshotRecorder

__all__ = ["DIAGNOSTICS_FILE", "METADATA_FILE", "PARTIAL_MARKER", "RunWriter", "SnapshotRecorder"]
