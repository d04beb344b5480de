"""Weight sequences a(n) and the conditions placed on them.

Everything is stored as ``log a(n)``; ``log n!`` comes from ``lgamma``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import mpmath
import numpy as np

from .errors import GrowthSpaceError, PrecisionLoss
from .growth_functions import (
    DEFAULT_POLICY,
    CoefficientCache,
    GrowthFunction,
    SeriesSum,
    TruncationPolicy,
    iterated_exp,
    legendre,
    series_growth,
    series_sum,
)
from .results import FAIL, PASS, CheckResult

BELL_N_MAX = 120


def log_factorial(n: int | np.ndarray) -> Any:
    if isinstance(n, np.ndarray):
        from scipy.special import gammaln

        return gammaln(n + 1.0)
    return math.lgamma(n + 1)


class WeightSequence:
    """A positive sequence ``a(n)`` generated lazily in the log domain."""

    def __init__(self, gen: Callable[[int], float], origin: str, params: dict[str, Any] | None = None,
                 name: str | None = None, capacity: int | None = None) -> None:
        self._gen = gen
        self.origin = origin
        self.params = dict(params or {})
        self.name = name or origin
        self.capacity = capacity
        self._cache: list[float] = []

    def log_weight(self, n: int) -> float:
        if n < 0:
            raise IndexError(n)
        if self.capacity is not None and n > self.capacity:
            raise IndexError(f"{self.name} is only materialised up to n={self.capacity}")
        while len(self._cache) <= n:
            v = float(self._gen(len(self._cache)))
            if not math.isfinite(v):
                raise ValueError(f"non-finite log a({len(self._cache)}) in {self.name}")
            self._cache.append(v)
        return self._cache[n]

    def log_prefix(self, n_max: int) -> np.ndarray:
        self.log_weight(n_max)
        return np.asarray(self._cache[: n_max + 1])

    def __getitem__(self, n: int) -> float:
        return math.exp(self.log_weight(n))

    def to_csv(self, n_max: int) -> str:
        rows = ["n,log_weight"] + [f"{n},{v:.17g}" for n, v in enumerate(self.log_prefix(n_max))]
        return "\n".join(rows) + "\n"

    def __repr__(self) -> str:
        return f"WeightSequence({self.name})"


def ones() -> WeightSequence:
    return WeightSequence(lambda n: 0.0, "ones", name="ones")


def factorial_power(beta: float) -> WeightSequence:
    """``a(n) = (n!)^beta``."""
    return WeightSequence(lambda n: beta * math.lgamma(n + 1), "factorial_power", {"beta": beta},
                          f"factorial_power:{beta:g}")


def explicit(values: Sequence[float]) -> WeightSequence:
    vals = [math.log(v) for v in values]
    return WeightSequence(lambda n: vals[n], "explicit", {"length": len(vals)}, "explicit", len(vals) - 1)


def weights_from_growth(growth: GrowthFunction) -> WeightSequence:
    """``a(n) = 1 / (n! leg(n))``."""
    return WeightSequence(lambda n: -math.lgamma(n + 1) - legendre(growth, n).log_value, "from_growth",
                          {"growth": growth}, f"from-growth:{growth.name}")


# ---------------------------------------------------------------------------
# Bell numbers of higher order


def _bell_mp(k: int, n_max: int, dps: int) -> list[Any]:
    """EGF coefficients of ``exp_{k+1}(x) / exp_{k+1}(0)`` at ``dps`` digits.

    The series of ``exp(h)`` with ``h(0) = 0`` follows from ``g' = h' g``:
    ``g_{n+1} = sum_j C(n, j) h_{j+1} g_{n-j}`` in EGF form.  Starting from
    ``h = e^x - 1`` and iterating ``h <- exp_j(0) * (g - 1)`` adds one layer
    of exponentials per round.
    """
    with mpmath.workdps(dps):
        binom = [[mpmath.binomial(n, j) for j in range(n + 1)] for n in range(n_max + 1)]
        h = [mpmath.mpf(0)] + [mpmath.mpf(1)] * n_max
        level_value = mpmath.e  # exp_1(0) after the first layer
        g: list[Any] = []
        for layer in range(k):
            g = [mpmath.mpf(1)] + [mpmath.mpf(0)] * n_max
            for n in range(n_max):
                acc = mpmath.fsum(binom[n][j] * h[j + 1] * g[n - j] for j in range(n + 1))
                g[n + 1] = acc
            if layer + 1 < k:
                h = [mpmath.mpf(0)] + [level_value * c for c in g[1:]]
                level_value = mpmath.exp(level_value)
        return g


def bell_numbers(k: int, n_max: int = 60) -> WeightSequence:
    """Bell numbers of order ``k`` (``b_1`` are the classical Bell numbers).

    The coefficients are computed twice, at 40 and 60 significant digits, and
    must agree to ``1e-8`` relative.
    """
    if not 1 <= k <= 3:
        raise ValueError("k must be 1, 2 or 3")
    if not 0 <= n_max <= BELL_N_MAX:
        raise ValueError(f"n_max must be at most {BELL_N_MAX}")
    lo = _bell_mp(k, n_max, 40)
    hi = _bell_mp(k, n_max, 60)
    logs = []
    with mpmath.workdps(60):
        for n, (a, b) in enumerate(zip(lo, hi)):
            if b <= 0 or abs(a - b) > mpmath.mpf("1e-8") * abs(b):
                raise PrecisionLoss(f"Bell coefficient {n} unstable across precisions")
            logs.append(float(mpmath.log(b)))
    seq = WeightSequence(lambda n: logs[n], "bell", {"k": k}, f"bell:{k}", n_max)
    seq.params["exact"] = [hi_n for hi_n in hi]
    return seq


def bell_triangle(n_max: int) -> list[int]:
    """Classical Bell numbers by the Aitken triangle."""
    out = [1]
    row = [1]
    for _ in range(n_max):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
        out.append(row[0])
    return out


# ---------------------------------------------------------------------------
# generating functions


def _gf_cache(seq: WeightSequence, direction: str) -> CoefficientCache:
    key = f"_gf_{direction}"
    cache = seq.params.get(key)
    if cache is None:
        sign = 1.0 if direction == "direct" else -1.0
        if direction not in ("direct", "reciprocal"):
            raise ValueError(direction)
        cache = CoefficientCache(lambda n: sign * seq.log_weight(n) - math.lgamma(n + 1))
        seq.params[key] = cache
    return cache


def generating_function_sum(seq: WeightSequence, direction: str, r: float,
                            trunc: TruncationPolicy = DEFAULT_POLICY) -> SeriesSum:
    return series_sum(_gf_cache(seq, direction), r, trunc)


def generating_function(seq: WeightSequence, direction: str, r: float,
                        trunc: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``direct``: ``sum a(n) r^n / n!``; ``reciprocal``: ``sum r^n / (n! a(n))``."""
    return generating_function_sum(seq, direction, r, trunc).value


def generating_growth(seq: WeightSequence, direction: str = "direct") -> GrowthFunction:
    """The generating function as a growth function.

    For Bell numbers of order ``k`` the direct series is the closed
    form ``exp_{k+1}(r) / exp_{k+1}(0)``, so it is not limited by the
    materialised prefix.
    """
    if seq.origin == "bell" and direction == "direct":
        return iterated_exp(int(seq.params["k"]) + 1)
    return series_growth(_gf_cache(seq, direction), f"{direction}[{seq.name}]")


# ---------------------------------------------------------------------------
# equivalence of sequences


@dataclass(frozen=True)
class SequenceCertificate:
    K1: float
    c1: float
    K2: float
    c2: float
    n_max: int


@dataclass(frozen=True)
class SequenceCounterexample:
    n: int
    detail: str


DIVERGENCE_JUMP = 0.1


def sequence_equivalence(a: WeightSequence, b: WeightSequence, n_max: int
                         ) -> SequenceCertificate | SequenceCounterexample:
    """Find ``K1 c1^n a(n) <= b(n) <= K2 c2^n a(n)`` for ``n <= n_max``.

    The slopes are the extreme values of ``(log b/a (n) - log b/a (0)) / n``
    and ``K = b(0)/a(0)``.  A prefix always admits such constants, so the
    verdict also looks at the trend: if the increments of ``log b/a`` over
    the last quarter differ from those of the previous quarter by more than
    ``DIVERGENCE_JUMP`` the ratio is judged super- or sub-exponential.
    """
    d = b.log_prefix(n_max) - a.log_prefix(n_max)
    if n_max >= 8:
        inc = np.diff(d)
        q = max(1, n_max // 4)
        late, mid = inc[-q:].mean(), inc[-2 * q:-q].mean()
        if abs(late - mid) > DIVERGENCE_JUMP:
            n_bad = int(n_max)
            trend = "grows" if late > mid else "decays"
            return SequenceCounterexample(n_bad, f"log b(n)/a(n) {trend} faster than linearly")
    if n_max == 0:
        k = math.exp(d[0])
        return SequenceCertificate(k, 1.0, k, 1.0, 0)
    slopes = (d[1:] - d[0]) / np.arange(1, n_max + 1)
    k = math.exp(d[0])
    return SequenceCertificate(k, math.exp(slopes.min()), k, math.exp(slopes.max()), n_max)


# ---------------------------------------------------------------------------
# condition checks

TOL = 1e-9
SIGMA_GRID = tuple(2**j for j in range(11))
C_GRID_STEP = 0.25  # constants searched on 2^(j/4)
C_GRID_MAX_J = 160


def _log_concave(cond: str, logs: np.ndarray, n_max: int, tol: float = TOL,
                 extra: dict[str, Any] | None = None) -> CheckResult:
    d2 = logs[2:] - 2.0 * logs[1:-1] + logs[:-2]
    wit: dict[str, Any] = dict(extra or {})
    if d2.size == 0:
        return CheckResult(cond, PASS, wit, None, n_max)
    i = int(np.argmax(d2))
    wit["max_second_difference"] = float(d2[i])
    if d2[i] <= tol:
        return CheckResult(cond, PASS, wit, None, n_max)
    return CheckResult(cond, FAIL, wit, {"n": i + 1, "second_difference": float(d2[i])}, n_max)


def _nf(n_max: int) -> np.ndarray:
    return log_factorial(np.arange(n_max + 1, dtype=float))


def _n_log_n(n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1, dtype=float)
    out = np.zeros_like(n)
    out[1:] = n[1:] * np.log(n[1:])
    return out


def _smallest_grid_constant(need_log: float) -> float | None:
    """Smallest ``2^(j/4)`` with ``j >= 0`` whose log is at least ``need_log``."""
    j = max(0, math.ceil(need_log / (C_GRID_STEP * math.log(2.0)) - 1e-9))
    if j > C_GRID_MAX_J:
        return None
    return 2.0 ** (j * C_GRID_STEP)


def legendre_of_generating_function(seq: WeightSequence, direction: str, n_max: int) -> np.ndarray:
    """``log inf_r G(r)/r^n`` via the Legendre engine on the generating function."""
    g = seq.params.get(f"_growth_{direction}")
    if g is None:
        g = generating_growth(seq, direction)
        seq.params[f"_growth_{direction}"] = g
    return np.array([legendre(g, n).log_value for n in range(n_max + 1)])


def _generating_witness(seq: WeightSequence, direction: str, n_max: int) -> np.ndarray:
    """Log of the log-concave comparison sequence produced by the Legendre engine.

    For the direct series this is ``b(n) = n! leg_G(n)``, so ``b(n)/n!`` is
    log-concave; for the reciprocal series it is ``1/(n! leg_G(n))``.
    """
    log_leg = legendre_of_generating_function(seq, direction, n_max)
    nf = _nf(n_max)
    return nf + log_leg if direction == "direct" else -nf - log_leg


def check(seq: WeightSequence, cond: str, n_max: int = 60) -> CheckResult:
    """Decide ``A1, A2, B1, B1tilde, B2, B2tilde, nearB2, nearB2tilde, C1, C2, C3`` on ``n <= n_max``."""
    la = seq.log_prefix(n_max)
    nf = _nf(n_max)
    if cond == "A1":
        return _check_a1(la, n_max)
    if cond == "A2":
        n = np.arange(1, n_max + 1)
        roots = (la[1:] - nf[1:]) / n
        half = n_max // 2
        tail = roots[half - 1:]
        decreasing = bool(np.all(np.diff(tail) <= TOL))
        wit = {"root_at_half": math.exp(roots[half - 1]), "root_at_end": math.exp(roots[-1])}
        if decreasing and roots[-1] < roots[half - 1]:
            return CheckResult(cond, PASS, wit, None, n_max)
        return CheckResult(cond, FAIL, wit, {"n": n_max, "root": math.exp(roots[-1])}, n_max)
    if cond == "B2":
        return _log_concave(cond, la - nf, n_max)
    if cond == "B2tilde":
        return _log_concave(cond, -nf - la, n_max)
    if cond in ("nearB2", "nearB2tilde"):
        return _check_near(seq, cond, n_max)
    if cond in ("B1", "B1tilde"):
        direction = "direct" if cond == "B1" else "reciprocal"
        log_leg = legendre_of_generating_function(seq, direction, n_max)
        n = np.arange(1, n_max + 1)
        if cond == "B1":
            q = (nf[1:] - la[1:] + log_leg[1:]) / n
        else:
            q = (nf[1:] + la[1:] + log_leg[1:]) / n
        q = np.exp(q)
        cut = (2 * n_max) // 3
        wit = {"quantity_at_end": float(q[-1]), "max_up_to_two_thirds": float(q[:cut].max()), "statistic": "limsup of (n!/a(n) * leg_G(n))^(1/n)"}
        if q[-1] <= 1.25 * q[:cut].max():
            return CheckResult(cond, PASS, wit, None, n_max)
        return CheckResult(cond, FAIL, wit, {"n": n_max, "quantity": float(q[-1])}, n_max)
    if cond in ("C1", "C2", "C3"):
        return _check_c(cond, la, n_max)
    raise ValueError(f"unknown condition {cond!r}")


def _check_a1(la: np.ndarray, n_max: int) -> CheckResult:
    if abs(la[0]) > TOL:
        return CheckResult("A1", FAIL, {}, {"n": 0, "alpha0": math.exp(la[0])}, n_max)
    n = np.arange(n_max + 1)
    quarter = max(1, n_max // 4)
    for sigma in SIGMA_GRID:
        vals = la + n * math.log(sigma)
        i = int(np.argmin(vals))
        if i <= n_max - quarter:
            return CheckResult("A1", PASS, {"sigma": sigma, "inf": math.exp(vals[i]), "argmin_n": i}, None, n_max)
    return CheckResult("A1", FAIL, {"sigma_max": SIGMA_GRID[-1]}, {"n": n_max, "reason": "running infimum still falling"}, n_max)


def near_witnesses(seq: WeightSequence, tilde: bool, n_max: int) -> list[tuple[str, Callable[[], np.ndarray]]]:
    """Canonical comparison sequences for the near-(B2) conditions, as log-values.

    Without ``tilde`` the candidates are the sequence itself,
    ``a(n) (n!)^2 / n^(2n)`` and ``n! leg_G(n)`` for its generating function;
    with ``tilde`` they are the sequence itself and ``1/(n! leg_G(n))`` for
    the reciprocal generating function.
    """
    la = seq.log_prefix(n_max)
    nf = _nf(n_max)
    out: list[tuple[str, Callable[[], np.ndarray]]] = [("sequence itself", lambda: la)]
    if not tilde:
        out.append(("a(n) (n!)^2 / n^(2n)", lambda: la + 2.0 * nf - 2.0 * _n_log_n(n_max)))
        out.append(("n! leg_G(n) for the generating function", lambda: _generating_witness(seq, "direct", n_max)))
    else:
        out.append(("1/(n! leg_G(n)) for the reciprocal generating function",
                    lambda: _generating_witness(seq, "reciprocal", n_max)))
    return out


def find_near_witness(seq: WeightSequence, cond: str, n_max: int
                      ) -> tuple[str, np.ndarray, SequenceCertificate, CheckResult] | list[dict[str, Any]]:
    """First canonical witness that is log-concave in the required sense and equivalent.

    Returns ``(label, log_values, certificate, concavity_check)`` or, when none
    works, the list of attempts.
    """
    tilde = cond == "nearB2tilde"
    la = seq.log_prefix(n_max)
    nf = _nf(n_max)
    tried: list[dict[str, Any]] = []
    for label, make in near_witnesses(seq, tilde, n_max):
        try:
            comparison = make()
        except GrowthSpaceError as exc:
            tried.append({"witness": label, "error": str(exc)})
            continue
        test = (-nf - comparison) if tilde else (comparison - nf)
        res = _log_concave(cond, test, n_max)
        eq = sequence_equivalence(_from_logs(comparison), _from_logs(la), n_max)
        ok_eq = isinstance(eq, SequenceCertificate)
        tried.append({"witness": label, "log_concave": res.passed, "equivalent": ok_eq})
        if res.passed and ok_eq:
            return label, comparison, eq, res
    return tried


def _check_near(seq: WeightSequence, cond: str, n_max: int) -> CheckResult:
    """Only canonical witnesses are tried, never a search over every equivalent sequence."""
    found = find_near_witness(seq, cond, n_max)
    if isinstance(found, list):
        return CheckResult(cond, FAIL, {"scope": "canonical witnesses only"}, {"tried": found}, n_max)
    label, _, eq, res = found
    wit = {"witness": label, "K1": eq.K1, "c1": eq.c1, "K2": eq.K2, "c2": eq.c2,
           "max_second_difference": res.witness.get("max_second_difference"),
           "scope": "canonical witnesses only"}
    return CheckResult(cond, PASS, wit, None, n_max)


def _from_logs(logs: np.ndarray) -> WeightSequence:
    vals = [float(v) for v in logs]
    return WeightSequence(lambda n: vals[n], "explicit", name="witness", capacity=len(vals) - 1)


def _check_c(cond: str, la: np.ndarray, n_max: int) -> CheckResult:
    need = 0.0
    where: tuple[int, int] | None = None
    if cond == "C1":
        for m in range(1, n_max + 1):
            gaps = (la[: m + 1] - la[m]) / m
            j = int(np.argmax(gaps))
            if gaps[j] > need:
                need, where = float(gaps[j]), (j, m)
    else:
        for s in range(0, n_max + 1):
            n = np.arange(s + 1)
            if cond == "C2":
                gap = la[s] - la[n] - la[s - n]
            else:
                gap = la[n] + la[s - n] - la[s]
            j = int(np.argmax(gap))
            if s == 0:
                if gap[j] > TOL:
                    return CheckResult(cond, FAIL, {}, {"n": 0, "m": 0, "reason": "fails at n = m = 0 for every c"}, n_max)
                continue
            g = float(gap[j]) / s
            if g > need:
                need, where = g, (int(j), int(s - j))
    c = _smallest_grid_constant(need)
    wit = {"c": c, "needed_log_c": need, "grid": "2^(j/4)"}
    if where is not None:
        wit["tightest"] = list(where)
    if c is None:
        return CheckResult(cond, FAIL, wit, {"n": where[0], "m": where[1]}, n_max)
    return CheckResult(cond, PASS, wit, None, n_max)


def stirling_sandwich_holds(n: int) -> bool:
    """``e^-1 2^(-n/2) n! <= (n/e)^n <= n!`` evaluated with logs."""
    lf = math.lgamma(n + 1)
    mid = n * math.log(n) - n if n > 0 else 0.0
    return (-1.0 - 0.5 * n * math.log(2.0) + lf <= mid) and (mid <= lf)


def parse_sequence_spec(spec: str) -> WeightSequence:
    """``ones``, ``factorial_power:0.5``, ``bell:2``, ``from-growth:<function spec>``."""
    from .growth_functions import parse_function_spec

    s = spec.strip()
    if s == "ones":
        return ones()
    if s.startswith("factorial_power:"):
        return factorial_power(float(s.split(":", 1)[1]))
    if s.startswith("bell:"):
        return bell_numbers(int(s.split(":", 1)[1]), BELL_N_MAX)
    if s.startswith("from-growth:"):
        return weights_from_growth(parse_function_spec(s.split(":", 1)[1]))
    raise ValueError(f"unknown sequence spec {spec!r}")
