"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line; the same lines are repeated
in the pytest terminal summary.  Run directly (``python tests/test_acceptance.py``)
to get just the lines.
"""
from __future__ import annotations

import json
import time
from pathlib import Path

import pytest

from growthspace.cli import main
from growthspace.suites import run_suite

SEED = 42
RESULTS: list[str] = []

# (number, short title, suites, runtime budget in seconds)
CRITERIA = [
    (1, "Legendre transform of e^r equals (e/n)^n for n = 1..30", ["legendre-closed-form"], 1),
    (2, "dual transform maps the beta family to its partner", ["dual-pair"], 5),
    (3, "Legendre transforms of u and its dual multiply to e^(2t) t^(-2t)", ["dual-legendre-identity"], 5),
    (4, "the dual transform is an involution on the built-in functions", ["double-dual"], 10),
    (5, "integer Legendre samples are log-concave for every built-in", ["legendre-log-concave"], 1),
    (6, "constructive comparison sequence is log-concave over n!", ["near-b2-construction"], 1),
    (7, "Bell numbers match the triangle and order two passes B2", ["bell-numbers"], 2),
    (8, "norm of the truncated renormalised exponential matches the generating function",
     ["exp-vector-norm"], 5),
    (9, "dual-weighted norms are sandwiched by the ordinary ones", ["norm-sandwich"], 30),
    (10, "S-transform of the Wick product is the pointwise product", ["wick-s-multiplicative"], 30),
    (11, "evaluation-level operator identities", ["operator-identities"], 60),
    (12, "forward growth bounds for generalized and test functions",
     ["generalized-growth-bound", "test-growth-bound"], 60),
    (13, "converse bounds on exponential-vector certificates", ["generalized-converse", "test-converse"], 10),
    (14, "Gaussian integral and Hida measure check", ["gaussian-exp-integral", "hida-measure"], 30),
    (15, "intrinsic sup norm against the kernel norms", ["intrinsic-upper", "intrinsic-lower"], 120),
]


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title} ({detail})"
    RESULTS.append(line)
    print(line)


def _first_failure(report) -> str:
    for case in report.cases:
        if not case["passed"]:
            return f"first failing case {case['case']!r}"
    return ""


@pytest.mark.parametrize("number,title,keys,budget", CRITERIA, ids=[f"criterion-{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, title, keys, budget):
    start = time.perf_counter()
    reports = [run_suite(key, SEED) for key in keys]
    elapsed = time.perf_counter() - start
    violations = sum(r.violations for r in reports)
    cases = sum(r.trials for r in reports)
    ok = violations == 0 and elapsed < budget
    parts = [f"{cases} cases", f"{violations} violations", f"{elapsed:.1f}s of {budget}s"]
    for r in reports:
        if not r.passed:
            parts.append(f"{r.suite}: {_first_failure(r)}")
    record(number, title, ok, ", ".join(parts))
    assert violations == 0, f"{violations} violations in {keys}"
    assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"


def _strip_timestamps(directory: Path) -> dict[str, dict]:
    out = {}
    for path in sorted(directory.glob("*.json")):
        doc = json.loads(path.read_text())
        doc.pop("timestamp", None)
        out[path.name] = doc
    return out


def test_criterion_16_determinism(tmp_path):
    timings = []
    for name in ("first", "second"):
        start = time.perf_counter()
        main(["verify", "all", "--seed", str(SEED), "--out", str(tmp_path / name)])
        timings.append(time.perf_counter() - start)
    first, second = _strip_timestamps(tmp_path / "first"), _strip_timestamps(tmp_path / "second")
    same = first == second and len(first) > 1
    ok = same and max(timings) < 300
    record(16, "verify all --seed 42 twice gives identical reports", ok,
           f"{len(first)} report files, identical={same}, runs took {timings[0]:.0f}s and {timings[1]:.0f}s")
    assert same
    assert max(timings) < 300


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
