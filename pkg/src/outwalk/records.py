"""CSV/JSON serialization for experiment records.

Floats are always written with 17 significant digits so reruns are
byte-identical and round-trip exactly; exact rationals are downcast to
float at this boundary only.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path


def fmt_value(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def jsonable(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt_value(x) for x in row])


def write_json(path, payload) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class ExperimentRecord:
    """One experiment run: name, seed, parameters, per-step rows, summary.

    Rerunning with the same seed reproduces the rows bit-identically; the
    approximation status of every numeric output is carried in ``notes``.
    """

    experiment: str
    seed: int
    params: dict
    header: tuple
    rows: list
    summary: dict = field(default_factory=dict)
    notes: tuple = ()

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "params": jsonable(self.params),
            "summary": jsonable(self.summary),
            "notes": list(self.notes),
        }
