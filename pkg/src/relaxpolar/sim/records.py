"""Trial records and the CSV/JSON files they are written to.

Every CSV starts with a versioned schema comment line; the JSON file next
to it holds the same rows.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

logger = logging.getLogger("relaxpolar.records")

TRIALS_SCHEMA = "relaxpolar-trials v1"
BOUNDS_SCHEMA = "relaxpolar-bounds v1"

TRIAL_FIELDS = (
    "point",
    "label",
    "decoder",
    "trials",
    "frame_errors",
    "bit_errors",
    "info_bits_total",
    "fer",
    "ber",
    "early_stopped",
    "wall_time",
)


@dataclass(frozen=True, slots=True)
class TrialRecord:
    """Monte-Carlo outcome at one sweep point (p for the BEC, SNR in dB for AWGN)."""

    point: float
    trials: int
    frame_errors: int
    bit_errors: int
    info_bits_total: int
    wall_time: float = 0.0
    label: str = "fp"
    decoder: str = "sc"
    early_stopped: bool = False

    @property
    def fer(self) -> float:
        return self.frame_errors / self.trials if self.trials else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits_total if self.info_bits_total else 0.0

    def fer_standard_error(self) -> float:
        if not self.trials:
            return 0.0
        return (self.fer * (1.0 - self.fer) / self.trials) ** 0.5

    def to_dict(self) -> dict[str, Any]:
        return {
            "point": self.point,
            "label": self.label,
            "decoder": self.decoder,
            "trials": self.trials,
            "frame_errors": self.frame_errors,
            "bit_errors": self.bit_errors,
            "info_bits_total": self.info_bits_total,
            "fer": self.fer,
            "ber": self.ber,
            "early_stopped": self.early_stopped,
            "wall_time": self.wall_time,
        }


def _write_rows(path: Path, schema: str, fields: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    rows = list(rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"# {schema}\n")
        writer = csv.DictWriter(handle, fieldnames=list(fields), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in fields})
    mirror = path.with_suffix(".json")
    mirror.write_text(json.dumps({"schema": schema, "rows": rows}, indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote %s (%d rows) and %s", path, len(rows), mirror.name)
    return mirror


def write_trial_records(path: Path, records: Iterable[TrialRecord]) -> Path:
    """Write trial records as CSV plus a JSON mirror; returns the JSON path."""
    return _write_rows(path, TRIALS_SCHEMA, TRIAL_FIELDS, (r.to_dict() for r in records))


def write_bound_rows(path: Path, rows: Sequence[Mapping[str, Any]]) -> Path:
    """Write one row per bounds grid point; columns follow the first row."""
    fields = list(rows[0].keys()) if rows else ["p"]
    return _write_rows(path, BOUNDS_SCHEMA, fields, rows)


def read_rows(path: Path) -> list[dict[str, str]]:
    """Read a CSV written here back as string rows, skipping the schema line."""
    with path.open("r", encoding="utf-8", newline="") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))
