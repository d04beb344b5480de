"""Scalar minimisation on the real line: doubling bracket plus golden section.

scipy's golden-section routine wants a strict three-point bracket and uses a
relative tolerance; here objectives are routinely flat on one side (growth
functions near r = 0) and the stopping rule is an absolute width in log
coordinates, so the few lines below are kept local.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import BracketFailure, NonFinite

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

LOG_R_MIN = math.log(1e-300)
LOG_R_MAX = 700.0


@dataclass(frozen=True)
class LineMin:
    x: float
    fx: float
    at_lower_boundary: bool = False


def _checked(f: Callable[[float], float], x: float) -> float:
    v = f(x)
    if math.isnan(v) or v == -math.inf:
        raise NonFinite(f"objective returned {v!r} at x={x!r}")
    return v


def bracket_minimum(
    f: Callable[[float], float],
    x0: float = 0.0,
    lo: float = LOG_R_MIN,
    hi: float = LOG_R_MAX,
    max_doublings: int = 64,
) -> tuple[float, float, float] | LineMin:
    """Expand steps 1, 2, 4, ... away from ``x0`` until the objective turns up.

    Returns a triple ``(a, b, c)`` with ``f(b) <= min(f(a), f(c))`` or, when the
    descent runs into ``lo``, a :class:`LineMin` sitting on that boundary.
    ``+inf`` values count as "uphill", which lets double-exponential growth
    functions overflow harmlessly on the right.
    """
    f0 = _checked(f, x0)
    step = 1.0
    right = min(x0 + step, hi)
    fr = _checked(f, right)
    if fr < f0:
        direction = 1.0
        b, fb = right, fr
    else:
        left = max(x0 - step, lo)
        fl = _checked(f, left)
        if fl < f0:
            direction = -1.0
            b, fb = left, fl
        else:
            return (left, x0, right)
    a = x0
    for _ in range(max_doublings):
        step *= 2.0
        c = b + direction * step
        if direction < 0 and c <= lo:
            c = lo
        if direction > 0 and c >= hi:
            raise BracketFailure(f"descent reached the upper limit x={hi}")
        fc = _checked(f, c)
        if fc >= fb:
            return (a, b, c) if a < c else (c, b, a)
        if c == lo:
            return LineMin(c, fc, True)
        a, b, fb = b, c, fc
    raise BracketFailure(f"no bracket after {max_doublings} doublings from x0={x0}")


def golden_section(
    f: Callable[[float], float], a: float, c: float, xtol: float = 1e-10
) -> LineMin:
    """Golden-section refinement of a unimodal ``f`` on ``[a, c]``."""
    if a > c:
        a, c = c, a
    x1 = c - INV_PHI * (c - a)
    x2 = a + INV_PHI * (c - a)
    f1 = _checked(f, x1)
    f2 = _checked(f, x2)
    while c - a > xtol:
        if f1 <= f2:
            c, x2, f2 = x2, x1, f1
            x1 = c - INV_PHI * (c - a)
            f1 = _checked(f, x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (c - a)
            f2 = _checked(f, x2)
    return LineMin(x1, f1) if f1 <= f2 else LineMin(x2, f2)


def minimize_line(
    f: Callable[[float], float],
    x0: float = 0.0,
    lo: float = LOG_R_MIN,
    hi: float = LOG_R_MAX,
    xtol: float = 1e-10,
) -> LineMin:
    """Minimise ``f`` over ``[lo, hi]`` assuming it is unimodal."""
    br = bracket_minimum(f, x0, lo, hi)
    if isinstance(br, LineMin):
        return br
    a, b, c = br
    fb = f(b)
    best = golden_section(f, a, c, xtol)
    # Flat objectives can leave the refinement marginally above the bracket's
    # middle point; keep whichever is lower.
    if fb < best.fx:
        best = LineMin(b, fb)
    if a <= lo + xtol:
        fl = _checked(f, lo)
        if fl <= best.fx:
            return LineMin(lo, fl, True)
    return best
