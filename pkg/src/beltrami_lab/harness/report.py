"""Report containers and deterministic JSON/CSV emission."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path


@dataclass
class Check:
    """One measured quantity compared against a threshold.

    ``acceptance`` checks decide the exit code; the others are reported expectations.
    """

    name: str
    anchor: str
    measured: float
    threshold: float
    relation: str
    passed: bool
    acceptance: bool = False
    criterion: int | None = None
    detail: str = ""

    @classmethod
    def compare(cls, name, anchor, measured, threshold, relation="<=", **kw) -> "Check":
        m = float(measured)
        ok = {"<=": m <= threshold, ">=": m >= threshold, "<": m < threshold, ">": m > threshold}[relation]
        return cls(name, anchor, m, float(threshold), relation, bool(ok and math.isfinite(m)), **kw)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        crit = f"[{self.criterion}] " if self.criterion else ""
        return f"{tag} {crit}{self.name}: {self.measured:.4g} {self.relation} {self.threshold:.4g}"


@dataclass
class Report:
    experiment: str
    config: dict
    checks: list = field(default_factory=list)
    series: dict = field(default_factory=dict)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def add_row(self, series: str, anchor: str, **row) -> None:
        self.series.setdefault(series, []).append({"anchor": anchor, **row})

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.acceptance)

    def acceptance_checks(self, criterion: int | None = None) -> list:
        return [c for c in self.checks if c.acceptance and (criterion is None or c.criterion == criterion)]

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "series": self.series,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["experiment"], d["config"], [Check(**c) for c in d["checks"]], d["series"])


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "item") and callable(x.item):
        return _clean(x.item())
    return x


def emit_report(report: Report, path) -> list[Path]:
    """Write ``report.json`` and one ``<series>.csv`` per series into directory ``path``."""
    path = Path(path)
    written = []
    try:
        path.mkdir(parents=True, exist_ok=True)
        target = path / "report.json"
        target.write_text(json.dumps(_clean(report.to_dict()), indent=2, sort_keys=True) + "\n")
        written.append(target)
        for name, rows in sorted(report.series.items()):
            cols = sorted({k for row in rows for k in row})
            target = path / f"{name}.csv"
            with open(target, "w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
                w.writeheader()
                for row in rows:
                    w.writerow({k: _csv_cell(row.get(k, "")) for k in cols})
            written.append(target)
    except OSError as exc:
        raise OSError(f"cannot write report under {path}: {exc}") from exc
    return written


def _csv_cell(v):
    v = _clean(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return json.dumps(v)
    return v


def load_report(path) -> Report:
    return Report.from_dict(json.loads((Path(path) / "report.json").read_text()))
