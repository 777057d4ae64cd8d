"""Residual records and their JSON / CSV serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from typing import Iterable

FIELDS = ("suite", "identity", "equation", "inputs", "residual", "tolerance",
          "verdict", "wall_time_ms")


@dataclass
class ResidualReport:
    suite: str
    identity: str
    equation: str
    inputs: dict
    residual: float
    tolerance: float
    verdict: str
    wall_time_ms: float = 0.0
    note: str = field(default="", compare=False)

    @classmethod
    def gate(cls, suite, identity, equation, inputs, residual, tolerance, wall_time_ms=0.0):
        residual = float(residual)
        ok = math.isfinite(residual) and residual <= tolerance
        return cls(suite, identity, equation, dict(inputs), residual, float(tolerance),
                   "pass" if ok else "fail", float(wall_time_ms))

    @classmethod
    def diagnostic(cls, suite, identity, equation, inputs, residual, tolerance, wall_time_ms=0.0):
        return cls(suite, identity, equation, dict(inputs), float(residual), float(tolerance),
                   "diagnostic", float(wall_time_ms))

    @property
    def gating(self) -> bool:
        return self.verdict != "diagnostic"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def digest(self) -> str:
        return json.dumps(self.inputs, sort_keys=True)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in FIELDS}
        if self.note:
            d["note"] = self.note
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ResidualReport":
        return cls(**{k: d[k] for k in FIELDS}, note=d.get("note", ""))


def sort_records(records: Iterable[ResidualReport]) -> list[ResidualReport]:
    return sorted(records, key=lambda r: (r.suite, r.identity, r.digest()))


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def records_to_json(records: Iterable[ResidualReport]) -> str:
    rows = []
    for r in sort_records(records):
        d = r.to_dict()
        d["residual"] = _clean(d["residual"])
        rows.append(d)
    return json.dumps(rows, indent=1, sort_keys=False)


def records_from_json(text: str) -> list[ResidualReport]:
    rows = json.loads(text)
    out = []
    for d in rows:
        if isinstance(d["residual"], str):
            d["residual"] = float(d["residual"])
        out.append(ResidualReport.from_dict(d))
    return out


def records_to_csv(records: Iterable[ResidualReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in sort_records(records):
        w.writerow([r.suite, r.identity, r.equation, r.digest(), repr(r.residual),
                    repr(r.tolerance), r.verdict, repr(r.wall_time_ms)])
    return buf.getvalue()


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_emit(records: Iterable[ResidualReport], path: str, csv_path: str | None = None) -> None:
    """Write the sorted JSON report (and optional CSV mirror) atomically."""
    records = list(records)
    _atomic_write(path, records_to_json(records))
    if csv_path:
        _atomic_write(csv_path, records_to_csv(records))
