"""Report rows, canonical serialization and golden-file comparison."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

RELATIONS = ("le", "ge", "eq", "info")


def fmt(x) -> str:
    """12 significant digits in scientific notation; ints and strings pass through."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if x == 0:
            x = 0.0  # drop the sign of -0.0
        return f"{x:.11e}"
    return str(x)


@dataclass
class ReportRow:
    """One measured value against its bound.

    ``relation`` is how the two must compare: ``le`` (measured ≤ bound),
    ``ge``, ``eq`` (within ``tol``) or ``info`` (reported, never fails).
    """

    key: tuple[tuple[str, object], ...]
    measured: float
    bound: float | None
    relation: str = "le"
    tol: float = 1e-9

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        self.measured = float(self.measured)
        if self.bound is not None:
            self.bound = float(self.bound)

    @property
    def margin(self) -> float | None:
        if self.bound is None:
            return None
        if self.relation == "ge":
            return self.measured - self.bound
        if self.relation == "eq":
            return -abs(self.measured - self.bound)
        return self.bound - self.measured

    @property
    def passed(self) -> bool:
        if self.relation == "info" or self.bound is None:
            return True
        if self.relation == "eq":
            return abs(self.measured - self.bound) <= self.tol
        return self.margin >= -self.tol

    def sort_key(self) -> tuple:
        return tuple((type(v).__name__, v) if not isinstance(v, (int, float)) else ("num", v) for _, v in self.key)


@dataclass
class Report:
    experiment: str
    rows: list[ReportRow] = field(default_factory=list)

    def canonical(self) -> "Report":
        return Report(self.experiment, sorted(self.rows, key=ReportRow.sort_key))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def columns(self) -> list[str]:
        names: list[str] = []
        for r in self.rows:
            for k, _ in r.key:
                if k not in names:
                    names.append(k)
        return names

    def records(self) -> list[dict[str, str]]:
        cols = self.columns
        out = []
        for r in self.canonical().rows:
            kd = dict(r.key)
            rec = {"experiment": self.experiment}
            rec.update({c: fmt(kd.get(c)) for c in cols})
            rec.update(
                measured=fmt(r.measured), bound=fmt(r.bound), relation=r.relation,
                margin=fmt(r.margin), passed=fmt(r.passed),
            )
            out.append(rec)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        fields = ["experiment", *self.columns, "measured", "bound", "relation", "margin", "passed"]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(self.records())
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {"experiment": self.experiment, "passed": self.passed, "rows": self.records()}
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"

    def render(self, fmt_name: str) -> str:
        if fmt_name == "csv":
            return self.to_csv()
        if fmt_name == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt_name!r}")


@dataclass(frozen=True)
class GoldenDiff:
    passed: bool
    row: int | None = None
    expected: str | None = None
    actual: str | None = None

    def message(self) -> str:
        if self.passed:
            return "golden match"
        return f"drift at row {self.row}:\n  expected: {self.expected}\n  actual:   {self.actual}"


def _lines(text: str) -> list[str]:
    return [ln.rstrip() for ln in text.replace("\r\n", "\n").strip("\n").split("\n")]


def golden_check(report_text: str, golden: str | Path) -> GoldenDiff:
    """Line-by-line comparison of a rendered report with a golden file.

    Row 0 is the header for CSV; the first differing line is reported.
    """
    path = Path(golden)
    if not path.exists():
        raise FileNotFoundError(f"golden file {path} does not exist")
    want, got = _lines(path.read_text()), _lines(report_text)
    for i in range(max(len(want), len(got))):
        a = want[i] if i < len(want) else None
        b = got[i] if i < len(got) else None
        if a != b:
            return GoldenDiff(False, i, a, b)
    return GoldenDiff(True)


def write_report(report: Report, out: str | Path | None, fmt_name: str) -> str:
    text = report.render(fmt_name)
    if out is not None:
        Path(out).write_text(text)
    return text


def summarize(reports: Sequence[Report]) -> str:
    lines = []
    for rep in reports:
        bad = sum(not r.passed for r in rep.rows)
        lines.append(f"{rep.experiment}: {len(rep.rows)} rows, {bad} failing")
    return "\n".join(lines)
