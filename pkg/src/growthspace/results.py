"""Result containers shared by the condition checkers and the verification suites."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

PASS = "PassOnGrid"
FAIL = "FailWithWitness"


@dataclass
class CheckResult:
    """Outcome of a grid-based condition check.

    ``witness`` holds the evidence behind the verdict (constants found, grid
    extent, extremal values); ``counterexample`` is filled only on failure.
    """

    condition: str
    verdict: str
    witness: dict[str, Any] = field(default_factory=dict)
    counterexample: dict[str, Any] | None = None
    n_max: int | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict[str, Any]:
        return {
            "condition": self.condition,
            "verdict": self.verdict,
            "n_max": self.n_max,
            "witness": to_jsonable(self.witness),
            "counterexample": to_jsonable(self.counterexample),
        }


def to_jsonable(obj: Any) -> Any:
    """Convert numpy values, tuples, complex numbers and non-finite floats for JSON."""
    if obj is None:
        return None
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, complex):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
    return obj


@dataclass
class VerificationReport:
    """What one suite found.

    Inequalities are recorded with :meth:`add` as the relative slack
    ``(rhs - lhs) / |rhs|`` and pass down to ``-tolerance``.  Identities go
    through :meth:`add_error`, whose margin ``tolerance - error`` must stay
    nonnegative.
    """

    suite: str
    reference: str
    seed: int
    tolerance: float
    cases: list[dict[str, Any]] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)
    timestamp: str = ""

    @property
    def trials(self) -> int:
        return len(self.cases)

    @property
    def violations(self) -> int:
        return sum(1 for c in self.cases if not c["passed"])

    @property
    def worst_margin(self) -> float:
        margins = [c["margin"] for c in self.cases if c.get("margin") is not None]
        return min(margins) if margins else math.inf

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def add(self, label: str, margin: float, **detail: Any) -> bool:
        """Record a case whose verdict follows from its margin (NaN fails)."""
        margin = float(margin)
        ok = (not math.isnan(margin)) and margin >= -self.tolerance
        self.cases.append({"case": label, "margin": margin, "passed": ok, **detail})
        return ok

    def add_error(self, label: str, error: float, tol: float | None = None, **detail: Any) -> bool:
        """Record an identity check: the margin is ``tol - error`` and must be nonnegative."""
        tol = self.tolerance if tol is None else tol
        margin = tol - float(error)
        ok = (not math.isnan(margin)) and margin >= 0.0
        extra = {"tolerance": tol} if tol != self.tolerance else {}
        self.cases.append({"case": label, "margin": margin, "passed": ok, "error": float(error), **extra, **detail})
        return ok

    def add_verdict(self, label: str, ok: bool, **detail: Any) -> bool:
        """Record a yes/no case such as a condition check."""
        self.cases.append({"case": label, "margin": None, "passed": bool(ok), **detail})
        return bool(ok)

    def to_dict(self, include_cases: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "suite": self.suite,
            "reference": self.reference,
            "trials": self.trials,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "timestamp": self.timestamp,
            "notes": self.notes,
        }
        if include_cases:
            out["cases"] = self.cases
        return to_jsonable(out)
