"""Experiment reports: one JSON document per experiment plus flat CSV tables.

Payloads carry no timestamps, keys are sorted and floats are written with
``repr`` precision, so a fixed config and seed give byte-identical files.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["Check", "Record", "Report", "to_jsonable"]

RELATIONS = ("<=", ">=", "==", "is")


def to_jsonable(x):
    """Recursively convert numpy scalars/arrays and complex numbers to JSON types."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x)
    if x is None or isinstance(x, str):
        return x
    return repr(x)


@dataclass
class Check:
    """An asserted relation ``lhs <relation> rhs`` with absolute tolerance ``tol``."""

    name: str
    lhs: object
    rhs: object
    relation: str = "<="
    tol: float = 0.0
    passed: bool = None

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        if self.passed is None:
            self.passed = self._evaluate()

    def _evaluate(self):
        a, b = self.lhs, self.rhs
        if self.relation == "is":
            return bool(a == b)
        if not (math.isfinite(a) and math.isfinite(b)):
            return False
        if self.relation == "<=":
            return bool(a <= b + self.tol)
        if self.relation == ">=":
            return bool(a >= b - self.tol)
        return bool(abs(a - b) <= self.tol)

    def as_dict(self):
        return to_jsonable({"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                            "relation": self.relation, "tol": self.tol, "passed": self.passed})

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], d["lhs"], d["rhs"], d["relation"], d["tol"], d["passed"])


@dataclass
class Record:
    """One experiment cell: inputs, computed values and asserted checks.

    ``error`` holds the message of an internal-consistency failure that
    aborted the record; such a record counts as failed.
    """

    name: str
    inputs: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    error: str = None

    def check(self, name, lhs, rhs, relation="<=", tol=0.0):
        c = Check(name, lhs, rhs, relation, tol)
        self.checks.append(c)
        return c

    @property
    def passed(self):
        return self.error is None and all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "name": self.name,
            "inputs": to_jsonable(self.inputs),
            "values": to_jsonable(self.values),
            "checks": [c.as_dict() for c in self.checks],
            "error": self.error,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], d["inputs"], d["values"],
                   [Check.from_dict(c) for c in d["checks"]], d["error"])


@dataclass
class Report:
    """All records of one experiment with provenance (version, config hash, seed)."""

    experiment: str
    version: str
    config_hash: str
    seed: int
    records: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    def add(self, record):
        self.records.append(record)
        return record

    def add_table(self, name, header, rows):
        self.tables[name] = {"header": list(header), "rows": to_jsonable(rows)}

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    def failures(self):
        return [(r.name, c.name) for r in self.records for c in r.checks if not c.passed] + \
               [(r.name, "error") for r in self.records if r.error is not None]

    def as_dict(self):
        return {
            "experiment": self.experiment,
            "version": self.version,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "passed": self.passed,
            "n_checks": sum(len(r.checks) for r in self.records),
            "records": [r.as_dict() for r in self.records],
            "tables": self.tables,
        }

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(d["experiment"], d["version"], d["config_hash"], d["seed"],
                   [Record.from_dict(r) for r in d["records"]], d["tables"])

    def table_csv(self, name):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        t = self.tables[name]
        writer.writerow(t["header"])
        for row in t["rows"]:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def write(self, out_dir):
        """Write ``<experiment>.json`` and ``<experiment>_<table>.csv``; return the paths."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = [out / f"{self.experiment}.json"]
        paths[0].write_text(self.to_json())
        for name in sorted(self.tables):
            p = out / f"{self.experiment}_{name}.csv"
            p.write_text(self.table_csv(name))
            paths.append(p)
        return paths
