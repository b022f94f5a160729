"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also collected into the terminal summary.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from zeromodes import checks
from zeromodes.reports import strip_timing

RESULTS: list[str] = []

pytestmark = pytest.mark.slow


def verdict(label, ok, detail, elapsed, budget):
    ok = bool(ok) and elapsed < budget
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail} ({elapsed:.1f}s, budget {budget:g}s)"
    RESULTS.append(line)
    print(line)
    return ok


def failing(reports):
    return [f"{r.check_name}{r.parameters.get('field', '')}={r.computed:.3g}" for r in reports if not r.passed]


def test_c1_clifford_invariants():
    t0 = time.perf_counter()
    reps = checks.gamma_check(checks.RunConfig(), dims=range(2, 10))
    worst = max(r.computed for r in reps)
    assert verdict("1 clifford invariants n=2..9", not failing(reps),
                   f"max defect {worst:.1e}", time.perf_counter() - t0, 1)


def test_c2_zero_mode_equation():
    t0 = time.perf_counter()
    reps = []
    for s in (1, -1):
        cfg = checks.RunConfig(s=s)
        reps += checks.nullspace_check(cfg) + checks.zeromode_check(cfg)
    res = max(r.computed for r in reps if r.check_name == "zeromode.closed_form_residual")
    slopes = [round(r.computed, 2) for r in reps if r.check_name == "zeromode.fd_dirac_order"]
    assert verdict("2 zero-mode equation n=3 s=+-1", not failing(reps),
                   f"residual {res:.1e}, FD slopes {slopes}", time.perf_counter() - t0, 30)


def test_c3_sharpness_constants():
    cfg = checks.RunConfig()
    reps = [r for r in checks.constants_check(cfg, chain_dims=range(3, 10))
            if r.check_name.startswith(("constants.sharp", "constants.chain"))]
    # the runner also does sphere work; time only these records
    elapsed = sum(r.runtime_ms for r in {id(r): r for r in reps}.values()) / 1000
    norm = reps[0]
    chain = max(r.computed for r in reps[1:])
    assert verdict("3 sharpness constants", not failing(reps),
                   f"|A|^2 {norm.computed:.9f} vs {norm.target:.9f}, chain {chain:.1e}",
                   elapsed, 1)


def test_c4_integral_identity():
    t0 = time.perf_counter()
    cfg = checks.RunConfig(grid=129, radius=8.0, eps=(0.1, 0.03, 0.01))
    fine = checks.identity_check(cfg, pointwise=False)
    coarse = checks.identity_check(cfg, grid_points=65, pointwise=False)
    key = lambda r: (r.parameters["field"], r.parameters.get("eps"))  # noqa: E731
    c = {key(r): r.computed for r in coarse if r.check_name == "identity.integral_defect"}
    f = {key(r): r.computed for r in fine if r.check_name == "identity.integral_defect"}
    not_shrinking = [k for k in f if not f[k] < c[k]]
    bad = failing(fine)
    assert verdict("4 integral identity 129^3", not bad and not not_shrinking,
                   f"max defect {max(f.values()):.2e} over {len(f)} cases; failing {bad}; "
                   f"not refining {not_shrinking}", time.perf_counter() - t0, 300)


def test_c5_pointwise_steps():
    t0 = time.perf_counter()
    cfg = checks.RunConfig(eps=(0.1, 0.03, 0.01))
    reps = checks.pointwise_checks(cfg)
    at = max(r.computed for r in reps if ".at_h" in r.check_name)
    slopes = [r.computed for r in reps if r.check_name.endswith(".order")]
    assert verdict("5 pointwise steps, twistor, Weitzenboeck", not failing(reps),
                   f"max defect at h=0.1 {at:.1e}, slopes {min(slopes):.2f}..{max(slopes):.2f}",
                   time.perf_counter() - t0, 120)


def test_c6_equality_ledger():
    t0 = time.perf_counter()
    sweep = (0.03, 0.01, 0.003, 0.001)
    coarse = checks.ledger_check(checks.RunConfig(grid=65, eps=sweep))
    fine = checks.ledger_check(checks.RunConfig(grid=129, eps=()))
    terms = ("P", "R1", "R2", "S")
    rel = lambda reps, k: next(r.computed for r in reps if r.check_name == f"ledger.{k}_relative")  # noqa: E731
    shrink = {k: (rel(coarse, k), rel(fine, k)) for k in terms}
    # terms already at rounding level cannot shrink further
    not_shrinking = [k for k, (a, b) in shrink.items() if not (b < a or max(a, b) < 1e-12)]
    trend = {}
    for k in ("P_eps", "R_eps", "R1_eps", "R2_eps"):
        vals = next(r.parameters["values"] for r in coarse if r.check_name == f"ledger.{k}_trend")
        trend[k] = vals[-1] / vals[0]
    trending = all(v < 0.5 for v in trend.values())
    bad = failing(coarse) + failing(fine)
    detail = (f"65->129 {', '.join(f'{k} {a:.1e}->{b:.1e}' for k, (a, b) in shrink.items())}; "
              f"eps sweep last/first {', '.join(f'{k} {v:.2f}' for k, v in trend.items())}; failing {bad}")
    assert verdict("6 equality ledger", not bad and not not_shrinking and trending,
                   detail, time.perf_counter() - t0, 300)


def test_c7_sphere_side():
    t0 = time.perf_counter()
    reps = checks.sphere_checks(checks.RunConfig())
    spinor = next(r.computed for r in reps if r.check_name.startswith("sphere.spinor"))
    pull = max(abs(r.computed - r.target) / r.target for r in reps if r.check_name.startswith("sphere.pullback"))
    assert verdict("7 sphere side", not failing(reps),
                   f"|phi| spread {spinor:.1e}, pullback {pull:.1e}", time.perf_counter() - t0, 10)


def test_c8_yamabe_variational():
    t0 = time.perf_counter()
    cfg = checks.RunConfig()
    reps = checks.yamabe_check(cfg)
    reps += [r for r in checks.constants_check(cfg) if r.check_name == "constants.bubble_quotient"]
    detail = ", ".join(f"{r.check_name} {r.computed:.4g}" for r in reps)
    assert verdict("8 Sobolev quotient and descent", not failing(reps), detail,
                   time.perf_counter() - t0, 60)


def test_c9_determinism(tmp_path):
    t0 = time.perf_counter()
    docs = []
    for k in range(2):
        out = tmp_path / f"run{k}.json"
        proc = subprocess.run([sys.executable, "-m", "zeromodes", "all", "--seed", "42", "--out", str(out)],
                              capture_output=True, text=True)
        assert proc.returncode in (0, 1), proc.stderr
        docs.append(strip_timing(json.loads(out.read_text())))
    same = json.dumps(docs[0], sort_keys=True) == json.dumps(docs[1], sort_keys=True)
    assert verdict("9 determinism of `all --seed 42`", same,
                   f"{len(docs[0]['reports'])} records, all_pass={docs[0]['all_pass']}",
                   time.perf_counter() - t0, 900)
