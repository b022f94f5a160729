"""Verification records and their JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

CONFIG_VERSION = "1.0"

# Defaults for every tolerance used by the check runners; overridable per run.
DEFAULT_TOLERANCES: dict[str, float] = {
    "clifford": 1e-14,
    "zeromode_residual": 1e-10,
    "fd_slope": 0.3,
    "nullspace_dimension": 0.0,
    "identity_defect": 1e-2,
    "margin_precondition": 1e-8,
    "step_defect": 1e-3,
    "step_slope": 0.3,
    "ledger_relative": 5e-2,
    "ledger_twistor": 1e-2,
    "holder_residual": 1e-6,
    "eps_trend": 1.0,
    "sharp_norm": 1e-6,
    "constant_chain": 1e-14,
    "sphere_spinor": 1e-10,
    "pullback_norm": 1e-6,
    "sphere_functional": 1e-12,
    "bubble_quotient": 5e-3,
    "descent_quotient": 1e-2,
    "descent_profile": 2e-2,
    "quotient_gradient": 1e-6,
}


@dataclass
class VerificationReport:
    check_name: str
    parameters: dict
    computed: float
    target: float | None
    tolerance: float
    passed: bool = field(init=False)
    runtime_ms: int = 0

    def __post_init__(self):
        self.computed = float(self.computed)
        if self.target is None:
            self.passed = bool(self.computed <= self.tolerance)
        else:
            self.target = float(self.target)
            self.passed = bool(abs(self.computed - self.target) <= self.tolerance)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


@contextmanager
def timed():
    """Yields a one-element list that receives the elapsed milliseconds."""
    box = [0]
    t0 = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = int(round(1000 * (time.perf_counter() - t0)))


def _clean(obj):
    # JSON has no inf/nan; encode them as strings so output stays valid.
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def report_document(command: str, settings: dict, tolerances: dict,
                    reports: list[VerificationReport]) -> dict:
    return {
        "header": {
            "config_version": CONFIG_VERSION,
            "command": command,
            "settings": settings,
            "tolerances": dict(sorted(tolerances.items())),
        },
        "all_pass": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }


def to_json(document: dict) -> str:
    return json.dumps(_clean(document), indent=2, sort_keys=True) + "\n"


CSV_FIELDS = ["check_name", "parameters", "computed", "target", "tolerance", "pass", "runtime_ms"]


def to_csv(document: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for rec in document["reports"]:
        row = dict(rec)
        row["parameters"] = json.dumps(_clean(row["parameters"]), sort_keys=True)
        w.writerow({k: ("" if row[k] is None else row[k]) for k in CSV_FIELDS})
    return buf.getvalue()


def strip_timing(document: dict) -> dict:
    """Copy of a report document without the runtime fields."""
    out = json.loads(json.dumps(document))
    for rec in out["reports"]:
        rec.pop("runtime_ms", None)
    return out
