"""ClaimReport, threshold descriptors, and JSON/CSV emission."""
from __future__ import annotations

import csv
import io
import json
import math
import operator
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence, Union

REPORT_ONLY = "report-only"
REPORT_FIELDS = ("claim_id", "params", "metrics", "threshold", "pass", "runtime_ms")

_OPS = {"<": operator.lt, "<=": operator.le, "==": operator.eq, ">=": operator.ge, ">": operator.gt}
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Condition:
    """``metric op value`` where value is a number or the name of another metric."""

    metric: str
    op: str
    value: Union[float, str]

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"unknown operator {self.op!r}")

    def describe(self) -> str:
        v = self.value if isinstance(self.value, str) else repr(float(self.value))
        return f"{self.metric} {self.op} {v}"

    def holds(self, metrics: dict[str, Any]) -> bool:
        lhs = metrics.get(self.metric)
        rhs = metrics.get(self.value) if isinstance(self.value, str) else self.value
        if lhs is None or rhs is None:
            return False
        lhs, rhs = float(lhs), float(rhs)
        if math.isnan(lhs) or math.isnan(rhs):
            return False
        return _OPS[self.op](lhs, rhs)


def describe_threshold(conditions: Sequence[Condition]) -> str:
    return " and ".join(c.describe() for c in conditions) if conditions else REPORT_ONLY


def parse_threshold(text: str) -> list[Condition]:
    if text == REPORT_ONLY:
        return []
    out = []
    for part in text.split(" and "):
        metric, op, value = part.split(" ")
        out.append(Condition(metric, op, value if _NAME.match(value) else float(value)))
    return out


def evaluate_threshold(text: str, metrics: dict[str, Any]) -> bool:
    """pass as a function of the threshold descriptor and the metrics alone."""
    return all(c.holds(metrics) for c in parse_threshold(text))


@dataclass(frozen=True)
class ClaimReport:
    claim_id: str
    params: dict[str, Any]
    metrics: dict[str, Any]
    threshold: str
    passed: bool
    runtime_ms: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "claim_id": self.claim_id,
            "params": self.params,
            "metrics": self.metrics,
            "threshold": self.threshold,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
        }


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def reports_to_json(reports: Sequence[ClaimReport]) -> str:
    payload = []
    for r in reports:
        d = r.to_dict()
        d["metrics"] = {k: _jsonable(v) for k, v in d["metrics"].items()}
        payload.append(d)
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def reports_to_csv(reports: Sequence[ClaimReport]) -> str:
    names = sorted({k for r in reports for k in r.metrics})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["claim_id", "params", "threshold", "pass", "runtime_ms"] + [f"metric.{n}" for n in names])
    for r in reports:
        w.writerow([r.claim_id, _cell(r.params), r.threshold, _cell(r.passed), r.runtime_ms]
                   + [_cell(r.metrics.get(n)) for n in names])
    return buf.getvalue()


def emit_report(reports: Sequence[ClaimReport], fmt: str, path=None) -> str:
    """Serialize; write to ``path`` when given.  Returns the text."""
    fmt = fmt.lower()
    if fmt == "json":
        text = reports_to_json(reports)
    elif fmt == "csv":
        text = reports_to_csv(reports)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
