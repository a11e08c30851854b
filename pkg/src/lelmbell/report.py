"""Run reports: typed result records flattened to JSON-ready dicts."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .fock import DetectorMode
from .search import FeasibilityReport
from .symmetry import BellSet, TicTacToeDiagram, classify_tictactoe


def jsonable(obj: Any) -> Any:
    """Plain JSON types; complex numbers become ``[re, im]`` pairs."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, BellSet):
        return obj.key
    return obj


def classification_record(s: BellSet) -> dict:
    return {
        "kind": "classification",
        "set": s.key,
        "class": classify_tictactoe(s),
        "diagram": "/".join(TicTacToeDiagram.from_set(s).render().splitlines()),
    }


def mode_record(mode: DetectorMode | None):
    return None if mode is None else jsonable(mode.nu)


def feasibility_record(r: FeasibilityReport) -> dict:
    return {
        "kind": "feasibility",
        "set": r.set.key,
        "status": r.status,
        "best_residual": float(r.best_residual),
        "restarts_used": r.restarts_used,
        "witness": mode_record(r.witness),
    }


@dataclass
class RunReport:
    command: str
    config: dict
    results: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> dict:
        d = asdict(self)
        return jsonable({k: d[k] for k in ("version", "command", "config", "results", "summary", "timings")})

    def to_json(self, indent: int | None = 2) -> str:
        # json writes floats with repr, which round-trips every double exactly
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(
            command=d["command"],
            config=d["config"],
            results=d["results"],
            summary=d["summary"],
            timings=d["timings"],
            version=d["version"],
        )

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """One row per result; nested fields are JSON-encoded."""
        rows = [self._flat(r) for r in self.to_dict()["results"]]
        columns = []
        for r in rows:
            columns += [k for k in r if k not in columns]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()

    @staticmethod
    def _flat(record: dict) -> dict:
        return {k: v if isinstance(v, (str, int, float, bool)) or v is None else json.dumps(v) for k, v in record.items()}
