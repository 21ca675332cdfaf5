"""Deterministic CSV/JSON emission with a versioned schema and run manifest.

Every file uses LF line endings and prints floats with 17 significant
digits, which round-trips float64 exactly, so reruns with the same seed are
byte-identical. Each JSON summary embeds a manifest (resolved config, seed,
schema and tool versions) sufficient to reproduce the run; wall time is
reported on stderr only, since embedding it would break byte-level
reproducibility of the outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1"

__all__ = ["SCHEMA_VERSION", "RunManifest", "fmt", "write_csv", "write_json"]


def fmt(value) -> str:
    """Render a cell: floats at 17 significant digits, others via str."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


@dataclass
class RunManifest:
    """Everything needed to reproduce a run byte-for-byte.

    ``wall_time_seconds`` is measured for operator feedback but is not
    serialized with the data products (it varies between identical runs).
    """

    command: str
    config_echo: dict
    master_seed: int
    schema_version: str = SCHEMA_VERSION
    tool_version: str = ""
    wall_time_seconds: float = field(default=0.0, compare=False)

    def to_json_dict(self) -> dict:
        return {
            "command": self.command,
            "config_echo": self.config_echo,
            "master_seed": self.master_seed,
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
        }


def write_csv(path: Path, header: list[str], rows) -> None:
    """Write rows of cells with an LF-terminated header line."""
    path = Path(path)
    with path.open("w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(cell) for cell in row) + "\n")


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path: Path, payload: dict) -> None:
    """Write a JSON document with sorted keys and LF endings."""
    path = Path(path)
    with path.open("w", newline="\n", encoding="utf-8") as fh:
        json.dump(_jsonify(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
