"""Persisted experiment records: JSON for the full run, CSV for headlines.

Rerunning the same config and seed reproduces identical per-unit results,
and the CSV serialization is byte-stable (floats via repr, no timestamps),
so output files can be compared directly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path


def toolkit_version() -> str:
    try:
        return metadata.version("hypermine")
    except metadata.PackageNotFoundError:  # pragma: no cover
        return "unknown"


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _jsonable(value):
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


@dataclass
class EvaluationRun:
    task: str
    config: dict
    dataset_hash: str
    units: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    wall_clock: float = 0.0
    version: str = field(default_factory=toolkit_version)

    def to_json(self, path) -> None:
        payload = _jsonable(asdict(self))
        Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def from_json(cls, path) -> "EvaluationRun":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**payload)


def format_cell(value) -> str:
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class Checkpoint:
    """Per-unit JSONL checkpoint so interrupted sweeps can resume."""

    def __init__(self, path):
        self.path = Path(path)
        self._done: dict[str, dict] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    record = json.loads(line)
                    self._done[record["unit"]] = record["result"]

    def get(self, unit: str):
        return self._done.get(unit)

    def put(self, unit: str, result: dict) -> None:
        self._done[unit] = result
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"unit": unit, "result": _jsonable(result)}) + "\n")

    def clear(self) -> None:
        if self.path.exists():
            self.path.unlink()
