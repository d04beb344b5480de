"""Named numerical verification suites.

Every suite sweeps one claim about growth functions, weight sequences or the
finite Fock model and records one case per check in a
:class:`~growthspace.results.VerificationReport`.  Parameters come from the
bundled ``defaults.toml``; a config file and command-line flags may override
them, but only keys a suite already declares.

Randomness is drawn from ``numpy.random.default_rng([seed, crc32(key)])``, so
each suite is reproducible on its own and independent of which other suites
run alongside it.
"""
from __future__ import annotations

import copy
import dataclasses
import math
import sys
import zlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import mpmath
import numpy as np

from . import fock_model as fm
from ._optim import minimize_line
from .errors import ConfigError, GrowthSpaceError
from .growth_functions import (
    Counterexample,
    GrowthFunction,
    conjugate_profile,
    convex_profile,
    custom,
    dual_legendre,
    dual_of,
    equivalence_witness,
    function_from_config,
    legendre,
    legendre_series,
    legendre_series_growth,
    log_legendre_prefix,
    monotone_envelope,
    parse_function_spec,
    power,
    reciprocal_series,
    reciprocal_series_growth,
    Flags,
)
from .results import VerificationReport
from .weight_sequences import (
    SequenceCertificate,
    WeightSequence,
    bell_numbers,
    bell_triangle,
    check,
    find_near_witness,
    generating_function,
    log_factorial,
    parse_sequence_spec,
    sequence_equivalence,
    weights_from_growth,
)

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

# Arguments whose log-value exceeds this cannot be resolved to a relative
# accuracy of 1e-5 in double precision (the spacing of doubles near 1e6 is
# about 1e-10, and the nested optimisations lose several more digits).
LOG_RESOLUTION_LIMIT = 1e6
SQRT_2E_OVER_LOG2 = math.sqrt(2.0 * math.e / math.log(2.0))


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Suite:
    key: str
    reference: str
    run: Callable[["SuiteContext", VerificationReport], None]


REGISTRY: dict[str, Suite] = {}


def suite(key: str, reference: str) -> Callable:
    def deco(fn: Callable[["SuiteContext", VerificationReport], None]) -> Callable:
        REGISTRY[key] = Suite(key, reference, fn)
        return fn

    return deco


@lru_cache(maxsize=1)
def _bundled_defaults() -> dict[str, Any]:
    text = resources.files("growthspace").joinpath("defaults.toml").read_text()
    return tomllib.loads(text)


def load_defaults() -> dict[str, Any]:
    """A fresh copy of the bundled defaults document."""
    return copy.deepcopy(_bundled_defaults())


def suite_keys() -> list[str]:
    return list(REGISTRY)


CONFIG_FUNCTION = "@config"


@dataclass
class SuiteContext:
    params: dict[str, Any]
    rng: np.random.Generator
    config_function: dict[str, Any] | None = None

    def __getitem__(self, name: str) -> Any:
        return self.params[name]

    def function(self, spec: str) -> GrowthFunction:
        if spec != CONFIG_FUNCTION:
            return parse_function_spec(spec)
        if self.config_function is None:
            raise ConfigError(f"{CONFIG_FUNCTION} used without a [function] table")
        table = dict(self.config_function)
        base = table.pop("_base_dir", None)
        return function_from_config(table, Path(base) if base else None)

    def functions(self) -> list[tuple[str, GrowthFunction]]:
        return [(spec, self.function(spec)) for spec in self.params["functions"]]

    def sequences(self) -> list[tuple[str, Any]]:
        return [(spec, parse_sequence_spec(spec)) for spec in self.params["sequences"]]

    def model(self) -> fm.SpaceModel:
        weights = tuple(self.params.get("mode_weights", ()))
        d = len(weights) if weights else int(self.params["d"])
        return fm.SpaceModel(d, weights)


def effective_params(key: str, overrides: dict[str, Any] | None = None) -> dict[str, Any]:
    """Defaults for ``key`` with ``overrides`` applied; unknown names are rejected."""
    if key not in REGISTRY:
        raise ConfigError(f"unknown suite {key!r}")
    params = dict(load_defaults()["suites"][key])
    for name, value in (overrides or {}).items():
        if name not in params:
            raise ConfigError(f"suite {key!r} has no parameter {name!r}")
        params[name] = value
    return params


def run_suite(key: str, seed: int, overrides: dict[str, Any] | None = None,
              config_function: dict[str, Any] | None = None) -> VerificationReport:
    """Run one suite.

    ``config_function`` is a ``[function]`` config table (optionally with a
    ``_base_dir`` entry for relative paths); it is what the spec ``@config``
    in a ``functions`` list refers to.  It travels as a plain table so suites
    can run in worker processes.
    """
    params = effective_params(key, overrides)
    entry = REGISTRY[key]
    rng = np.random.default_rng([seed, zlib.crc32(key.encode())])
    report = VerificationReport(key, entry.reference, seed, float(params["tolerance"]))
    report.notes["parameters"] = params
    if config_function is not None and CONFIG_FUNCTION in params.get("functions", []):
        report.notes["config_function"] = {k: v for k, v in config_function.items() if k != "_base_dir"}
    entry.run(SuiteContext(params, rng, config_function), report)
    return report


# ---------------------------------------------------------------------------
# shared helpers


def rel_err(value: float, target: float) -> float:
    if target == 0:
        return abs(value)
    return abs(value - target) / abs(target)


def log_rel_err(log_value: float, log_target: float) -> float:
    """Relative error of ``exp(log_value)`` against ``exp(log_target)``."""
    diff = log_value - log_target
    if math.isnan(diff):
        return math.nan
    if abs(diff) > 700:
        return math.inf
    return abs(math.expm1(diff))


def log_slack(log_lhs: float, log_rhs: float) -> float:
    """``(rhs - lhs) / rhs`` for positive sides given in logs."""
    if log_lhs == -math.inf:
        return 1.0
    if log_rhs == math.inf:
        return 1.0
    diff = log_lhs - log_rhs
    if math.isnan(diff):
        return math.nan
    if diff > 700:
        return -math.inf
    return -math.expm1(diff)


def slack(lhs: float, rhs: float) -> float:
    if rhs == 0:
        return 0.0 if lhs <= 0 else -math.inf
    return (rhs - lhs) / abs(rhs)


def safe_log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def unit_direction(rng: np.random.Generator, model: fm.SpaceModel, grade: float) -> np.ndarray:
    """Random complex vector with ``|v|_grade = 1``, drawn with per-mode scale ``w_j^(-grade)``."""
    z = (rng.standard_normal(model.d) + 1j * rng.standard_normal(model.d)) / math.sqrt(2.0)
    z *= model.weight_array ** (-grade)
    return z / model.norm(z, grade)


def sup_of_linear_minus_half_log(slope: float, log_g: Callable[[float], float], dilation: float) -> float:
    """``log sup_{t>=0} exp(slope t) g(dilation t^2)^(-1/2)`` by a line search in ``log t``."""

    def neg(x: float) -> float:
        t = math.exp(x)
        return 0.5 * log_g(dilation * t * t) - slope * t

    res = minimize_line(neg, 0.0, lo=-300.0, hi=300.0)
    return max(-res.fx, -0.5 * log_g(0.0))


def guarded(report: VerificationReport, label: str, fn: Callable[[], None], **detail: Any) -> None:
    """Run one case; a numerical failure becomes a failing case with the error text."""
    try:
        fn()
    except (GrowthSpaceError, OverflowError, ValueError, ZeroDivisionError) as exc:
        report.add(label, math.nan, error=f"{type(exc).__name__}: {exc}", **detail)


def _second_differences(values: np.ndarray) -> np.ndarray:
    return values[2:] - 2.0 * values[1:-1] + values[:-2]


# ---------------------------------------------------------------------------
# growth functions


@suite("legendre-closed-form", "the Legendre transform of e^r at a positive integer n equals (e/n)^n")
def _legendre_closed_form(ctx: SuiteContext, report: VerificationReport) -> None:
    growth = parse_function_spec("exp")
    for n in range(1, int(ctx["n_max"]) + 1):
        got = legendre(growth, n).log_value
        report.add_error(f"n={n}", log_rel_err(got, n * (1.0 - math.log(n))))


@suite("dual-pair", "the dual Legendre transform maps exp[(1+b) r^(1/(1+b))] to exp[(1-b) r^(1/(1-b))]")
def _dual_pair(ctx: SuiteContext, report: VerificationReport) -> None:
    rs = np.geomspace(ctx["r_min"], ctx["r_max"], int(ctx["points"]))
    for beta in ctx["betas"]:
        growth = parse_function_spec(f"beta_exp:{beta}")
        partner = parse_function_spec(f"beta_exp:{-beta}")
        for r in rs:
            got = dual_legendre(growth, float(r)).log_value
            report.add_error(f"beta={beta} r={r:.6g}", log_rel_err(got, partner.log_eval(float(r))))


@suite("dual-legendre-identity",
       "the Legendre transforms of u and of its dual satisfy leg_dual(t) leg(t) t^(2t) = e^(2t)")
def _dual_legendre_identity(ctx: SuiteContext, report: VerificationReport) -> None:
    for spec, growth in ctx.functions():
        dual = dual_of(growth)
        for t in ctx["ts"]:
            t = float(t)

            def one(t: float = t) -> None:
                total = legendre(dual, t).log_value + legendre(growth, t).log_value + 2.0 * t * math.log(t) - 2.0 * t
                report.add_error(f"{spec} t={t:g}", log_rel_err(total, 0.0))

            guarded(report, f"{spec} t={t:g}", one)


@suite("double-dual", "applying the dual Legendre transform twice returns an increasing (log, x^2)-convex u")
def _double_dual(ctx: SuiteContext, report: VerificationReport) -> None:
    rs = np.geomspace(ctx["r_min"], ctx["r_max"], int(ctx["points"]))
    unresolved = 0
    for spec, growth in ctx.functions():
        dual = dual_of(growth)
        for r in rs:
            r = float(r)
            target = growth.log_eval(r)
            beyond = not (abs(target) <= LOG_RESOLUTION_LIMIT)
            unresolved += beyond
            detail = {"log_u": target, "beyond_double_resolution": beyond}

            def one(r: float = r, target: float = target, detail: dict = detail) -> None:
                got = dual_legendre(dual, r).log_value
                report.add_error(f"{spec} r={r:.6g}", log_rel_err(got, target), **detail)

            guarded(report, f"{spec} r={r:.6g}", one, **detail)
    report.notes["points_beyond_double_resolution"] = unresolved


@suite("legendre-log-concave",
       "integer samples of the Legendre transform are log-concave, so the weights 1/(n! leg(n)) pass the "
       "reciprocal log-concavity condition")
def _legendre_log_concave(ctx: SuiteContext, report: VerificationReport) -> None:
    n_max = int(ctx["n_max"])
    for spec, growth in ctx.functions():
        def one(spec: str = spec, growth: GrowthFunction = growth) -> None:
            worst = float(_second_differences(log_legendre_prefix(growth, n_max)).max())
            report.add_error(f"{spec} second differences", max(worst, 0.0), max_second_difference=worst)
            res = check(weights_from_growth(growth), "B2tilde", n_max)
            report.add_verdict(f"{spec} weights B2tilde", res.passed, check=res.to_dict())

        guarded(report, spec, one)


@suite("near-b2-construction",
       "for u with U0, U2 and U3 the sequence a(n) (n!)^2 / n^(2n) built from the weights makes "
       "b(n)/n! log-concave and stays equivalent to the weights")
def _near_b2_construction(ctx: SuiteContext, report: VerificationReport) -> None:
    n_max = int(ctx["n_max"])
    nf = log_factorial(np.arange(n_max + 1))
    nlogn = np.array([0.0] + [n * math.log(n) for n in range(1, n_max + 1)])
    for spec, growth in ctx.functions():
        def one(spec: str = spec, growth: GrowthFunction = growth) -> None:
            seq = weights_from_growth(growth)
            la = seq.log_prefix(n_max)
            comparison = la + 2.0 * nf - 2.0 * nlogn
            worst = float(_second_differences(comparison - nf).max())
            report.add_error(f"{spec} b(n)/n! second differences", max(worst, 0.0), max_second_difference=worst)
            eq = sequence_equivalence(_explicit_logs(comparison), seq, n_max)
            report.add_verdict(f"{spec} equivalence", isinstance(eq, SequenceCertificate), certificate=dataclasses.asdict(eq))

        guarded(report, spec, one)


def _explicit_logs(logs: np.ndarray) -> WeightSequence:
    vals = [float(v) for v in logs]
    return WeightSequence(lambda n: vals[n], "explicit", name="comparison", capacity=len(vals) - 1)


@suite("bell-numbers",
       "Bell numbers of order one are the classical Bell numbers and those of order two satisfy the "
       "log-concavity condition B2")
def _bell_numbers(ctx: SuiteContext, report: VerificationReport) -> None:
    n_exact = int(ctx["n_exact"])
    b1 = bell_numbers(1, n_exact)
    oracle = bell_triangle(n_exact)
    with mpmath.workdps(60):
        for n, (mp_value, exact) in enumerate(zip(b1.params["exact"], oracle)):
            nearest = int(mpmath.nint(mp_value))
            report.add_verdict(f"b_1({n})", nearest == exact and abs(mp_value - exact) < 1e-6,
                               computed=str(nearest), oracle=str(exact))
    n_max = int(ctx["n_max"])
    for k in ctx["orders"]:
        res = check(bell_numbers(int(k), n_max), "B2", n_max)
        report.add_verdict(f"b_{k} B2 up to n={n_max}", res.passed, check=res.to_dict())


@suite("legendre-decay",
       "for (log, exp)-convex u the Legendre transform decays, its t-th root tends to zero, and "
       "sup_t leg(t) r^t recovers u(r)")
def _legendre_decay(ctx: SuiteContext, report: VerificationReport) -> None:
    n_lo, n_hi = int(ctx["n_lo"]), int(ctx["n_hi"])
    rs = np.geomspace(ctx["r_min"], ctx["r_max"], int(ctx["points"]))
    for spec, growth in ctx.functions():
        logs = log_legendre_prefix(growth, n_hi)
        tail = logs[n_lo:]
        report.add_verdict(f"{spec} decreasing on [{n_lo}, {n_hi}]", bool(np.all(np.diff(tail) < 0)))
        roots = tail / np.arange(n_lo, n_hi + 1)
        report.add_verdict(f"{spec} t-th root decreasing on [{n_lo}, {n_hi}]", bool(np.all(np.diff(roots) < 0)),
                           root_at_end=math.exp(roots[-1]))
        for r in rs:
            r = float(r)

            def one(r: float = r) -> None:
                lr = math.log(r)
                res = minimize_line(lambda t: -(legendre(growth, t).log_value + t * lr), 1.0, lo=0.0, hi=1e6)
                report.add_error(f"{spec} r={r:.6g}", log_rel_err(-res.fx, growth.log_eval(r)), t_star=res.x)

            guarded(report, f"{spec} r={r:.6g}", one)


@suite("legendre-submultiplicative",
       "for (log, x^k)-convex u, leg(t) t^(kt) is log-convex and leg(n) leg(m) <= leg(0) 2^(k(n+m)) leg(n+m)")
def _legendre_submultiplicative(ctx: SuiteContext, report: VerificationReport) -> None:
    k = float(ctx["k"])
    n_max = int(ctx["n_max"])
    for spec, growth in ctx.functions():
        logs = log_legendre_prefix(growth, 2 * n_max)
        n = np.arange(2 * n_max + 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            nlogn = np.where(n > 0, n * np.log(np.maximum(n, 1)), 0.0)
        convex = _second_differences(logs + k * nlogn)
        report.add_error(f"{spec} log-convexity of leg(n) n^(kn)", max(0.0, -float(convex.min())),
                         min_second_difference=float(convex.min()))
        worst, where = math.inf, (0, 0)
        for i in range(n_max + 1):
            for j in range(n_max + 1):
                s = log_slack(logs[i] + logs[j], logs[0] + k * (i + j) * math.log(2.0) + logs[i + j])
                if s < worst:
                    worst, where = s, (i, j)
        report.add(f"{spec} product bound n, m <= {n_max}", worst, tightest=list(where))


@suite("series-envelope",
       "the series sum_n leg(n) r^n is bounded by (e a / log a) u(a r), and u(r) <= C times the series at 2^k r")
def _series_envelope(ctx: SuiteContext, report: VerificationReport) -> None:
    rs = np.concatenate([[0.0], np.geomspace(ctx["r_min"], ctx["r_max"], int(ctx["points"]))])
    k = int(ctx["k"])
    for spec, growth in ctx.functions():
        series = legendre_series_growth(growth)
        ls = series.log_eval_many(rs)
        for a in ctx["dilations"]:
            bound = np.log(math.e * a / math.log(a)) + growth.log_eval_many(a * rs)
            margins = [log_slack(x, y) for x, y in zip(ls, bound)]
            i = int(np.argmin(margins))
            report.add(f"{spec} a={a:g}", margins[i], tightest_r=float(rs[i]))
        ratio = growth.log_eval_many(rs) - series.log_eval_many((2.0**k) * rs)
        i = int(np.argmax(ratio))
        late = ratio[len(ratio) * 3 // 4:]
        report.add_verdict(f"{spec} u(r) <= C series(2^{k} r)",
                           bool(np.isfinite(ratio[i]) and late.max() <= ratio[i]),
                           searched_C=math.exp(float(ratio[i])), attained_at=float(rs[i]))


@suite("dual-regularity", "the dual transform of u in C_{+,1/2} is increasing, (log, x^2)-convex and starts at 1")
def _dual_regularity(ctx: SuiteContext, report: VerificationReport) -> None:
    xs = np.linspace(0.0, float(ctx["x_max"]), int(ctx["points"]))
    for spec, growth in ctx.functions():
        dual = dual_of(growth)
        vals = dual.log_eval_many(xs**2)
        report.add_error(f"{spec} dual(0) = 1/inf u", abs(vals[0] + min(0.0, _log_inf(growth))))
        steps = np.diff(vals)
        report.add_verdict(f"{spec} increasing", bool(np.all(steps >= -1e-12 * np.maximum(1.0, np.abs(vals[1:])))))
        sd = _second_differences(vals)
        scale = np.maximum(1.0, np.abs(vals[1:-1]))
        worst = float((-sd / scale).max())
        report.add_error(f"{spec} convexity of log dual(x^2)", max(0.0, worst), tol=float(ctx["convexity_tol"]))


def _log_inf(growth: GrowthFunction) -> float:
    return legendre(growth, 0.0).log_value


@suite("dual-series-equivalence",
       "the dual transform, the Legendre series of the dual and the reciprocal series sum r^n/(leg(n) (n!)^2) "
       "are pairwise equivalent")
def _dual_series_equivalence(ctx: SuiteContext, report: VerificationReport) -> None:
    r_max = float(ctx["r_max"])
    for spec, growth in ctx.functions():
        dual = dual_of(growth)
        members = {"dual": dual, "reciprocal series": reciprocal_series_growth(growth),
                   "series of dual": legendre_series_growth(dual)}
        # the dilation search evaluates its first argument far beyond r_max, so the
        # expensive series of the dual only ever appears second
        for left, right in (("dual", "reciprocal series"), ("dual", "series of dual"),
                            ("reciprocal series", "series of dual")):
            res = equivalence_witness(members[left], members[right], r_max, int(ctx["points"]))
            report.add_verdict(f"{spec} {left} ~ {right}", not isinstance(res, Counterexample),
                               certificate=dataclasses.asdict(res))


@suite("profile-conversion",
       "writing u(r) = exp(2 profile(sqrt r)), the dual transform is exp(2 profile*(sqrt r)) for the convex "
       "conjugate profile*")
def _profile_conversion(ctx: SuiteContext, report: VerificationReport) -> None:
    rs = np.geomspace(ctx["r_min"], ctx["r_max"], int(ctx["points"]))
    for spec, growth in ctx.functions():
        profile = convex_profile(growth)
        back = profile.to_growth()
        conj = conjugate_profile(profile)
        for r in rs:
            r = float(r)
            report.add_error(f"{spec} round trip r={r:.4g}", abs(back.log_eval(r) - growth.log_eval(r)))
            via_profile = 2.0 * conj(math.sqrt(r))
            report.add_error(f"{spec} conjugate r={r:.4g}", log_rel_err(via_profile, dual_legendre(growth, r).log_value))


@suite("monotone-envelope",
       "flattening u to its minimum value before the minimiser leaves the Legendre transform unchanged")
def _monotone_envelope(ctx: SuiteContext, report: VerificationReport) -> None:
    centre = float(ctx["centre"])
    bumpy = custom(lambda r: (r - centre) ** 2, f"exp((r-{centre:g})^2)", Flags(in_C_plus_log=True, U0=True))
    env = monotone_envelope(bumpy)
    report.add_error("minimiser located", abs(env.params["r_min"] - centre), tol=1e-6)
    for t in ctx["ts"]:
        t = float(t)
        report.add_error(f"t={t:g}", log_rel_err(legendre(env, t).log_value, legendre(bumpy, t).log_value))
    rs = np.linspace(0.0, 3.0 * centre, 301)
    vals = env.log_eval_many(rs)
    report.add_verdict("envelope nondecreasing", bool(np.all(np.diff(vals) >= 0)))
    report.add_verdict("envelope below u", bool(np.all(vals <= bumpy.log_eval_many(rs) + 1e-15)))


@suite("series-square",
       "for (log, x^k)-convex u the series satisfies series(r)^2 <= leg(0) series(2^(k+1) r) and, when u "
       "increases, series(r) <= sqrt(leg(0) e a / log a) u(a 2^(k+1) r)^(1/2)")
def _series_square(ctx: SuiteContext, report: VerificationReport) -> None:
    k = int(ctx["k"])
    a = float(ctx["a"])
    rs = np.concatenate([[0.0], np.geomspace(ctx["r_min"], ctx["r_max"], int(ctx["points"]))])
    for spec, growth in ctx.functions():
        series = legendre_series_growth(growth)
        l0 = legendre(growth, 0.0).log_value
        ls = series.log_eval_many(rs)
        big = series.log_eval_many(2.0 ** (k + 1) * rs)
        m = [log_slack(2 * x, l0 + y) for x, y in zip(ls, big)]
        i = int(np.argmin(m))
        report.add(f"{spec} square bound", m[i], tightest_r=float(rs[i]))
        lower = [log_slack(l0 + x, 2 * x) for x in ls]
        report.add(f"{spec} leg(0) series <= series^2", min(lower))
        root = [log_slack(x, 0.5 * (l0 + math.log(math.e * a / math.log(a)) + growth.log_eval(a * 2 ** (k + 1) * r)))
                for x, r in zip(ls, rs)]
        i = int(np.argmin(root))
        report.add(f"{spec} root bound a={a:g}", root[i], tightest_r=float(rs[i]))


@suite("square-equivalence", "u and u^2 are equivalent for (log, x^k)-convex u, and so are their Legendre series")
def _square_equivalence(ctx: SuiteContext, report: VerificationReport) -> None:
    for spec, growth in ctx.functions():
        res = equivalence_witness(growth, power(growth, 2.0), float(ctx["r_max"]), int(ctx["points"]))
        report.add_verdict(f"{spec} u ~ u^2", not isinstance(res, Counterexample), certificate=dataclasses.asdict(res))
        series = legendre_series_growth(growth)
        res = equivalence_witness(series, power(series, 2.0), float(ctx["r_max"]), int(ctx["points"]))
        report.add_verdict(f"{spec} series ~ series^2", not isinstance(res, Counterexample), certificate=dataclasses.asdict(res))


# ---------------------------------------------------------------------------
# weight sequences


@suite("weights-from-growth",
       "for u in C_{+,1/2} with U0, U2 and U3 the weights 1/(n! leg(n)) satisfy A1, A2, near-B2 and the "
       "reciprocal log-concavity condition; A1 comes with the explicit bound a(n) (c2 sqrt 2)^n >= 1/(c1 e)")
def _weights_from_growth(ctx: SuiteContext, report: VerificationReport) -> None:
    n_max = int(ctx["n_max"])
    for spec, growth in ctx.functions():
        seq = weights_from_growth(growth)
        for cond in ("A1", "A2", "nearB2", "B2tilde"):
            res = check(seq, cond, n_max)
            report.add_verdict(f"{spec} {cond}", res.passed, check=res.to_dict())
        if growth.flags.u2 is not None:
            c1, c2 = growth.flags.u2
            la = seq.log_prefix(n_max)
            n = np.arange(n_max + 1)
            lhs = -(math.log(c1) + 1.0)
            margins = [log_slack(lhs, v) for v in la + n * math.log(c2 * math.sqrt(2.0))]
            report.add(f"{spec} explicit lower bound", min(margins))


@suite("reciprocal-series-identity",
       "the generating function of the weights 1/(n! leg(n)) is the reciprocal series sum r^n/(leg(n) (n!)^2)")
def _reciprocal_series_identity(ctx: SuiteContext, report: VerificationReport) -> None:
    rs = np.geomspace(ctx["r_min"], ctx["r_max"], int(ctx["points"]))
    for spec, growth in ctx.functions():
        seq = weights_from_growth(growth)
        for r in rs:
            r = float(r)
            report.add_error(f"{spec} r={r:.4g}", rel_err(generating_function(seq, "direct", r), reciprocal_series(growth, r)))


@suite("binomial-bound",
       "if b(n)/n! is log-concave and b(0) = 1 then b(n+m) <= C(n+m, n) b(n) b(m) <= 2^(n+m) b(n) b(m)")
def _binomial_bound(ctx: SuiteContext, report: VerificationReport) -> None:
    n_max = int(ctx["n_max"])
    nf = log_factorial(np.arange(n_max + 1))
    for spec, seq in ctx.sequences():
        la = seq.log_prefix(n_max)
        lb = la - la[0]
        hyp = check(seq, "B2", n_max)
        report.add_verdict(f"{spec} hypothesis b(n)/n! log-concave", hyp.passed)
        worst_binom = worst_pow = math.inf
        for s in range(n_max + 1):
            for i in range(s + 1):
                binom = nf[s] - nf[i] - nf[s - i]
                worst_binom = min(worst_binom, log_slack(lb[s], binom + lb[i] + lb[s - i]))
                worst_pow = min(worst_pow, log_slack(binom, s * math.log(2.0)))
        report.add(f"{spec} binomial bound", worst_binom)
        report.add(f"{spec} power-of-two bound", worst_pow)


def _near_constant(seq, cond: str, n_max: int) -> tuple[float, np.ndarray] | str:
    """Constant ``c`` produced by the comparison-sequence argument, or the reason it is unavailable."""
    found = find_near_witness(seq, cond, n_max)
    if isinstance(found, list):
        return f"no canonical witness: {found}"
    _, comparison, eq, _ = found
    first = math.exp(comparison[0])
    ratio = 2.0 * eq.c2 / eq.c1
    if cond == "nearB2":
        c = max(1.0, eq.K2 / (first * eq.K1**2), ratio)
    else:
        c = max(1.0, eq.K2**2 * first / eq.K1, ratio)
    return c, comparison


@suite("c2-from-near-b2",
       "a sequence with near-B2 and a(0) >= 1 satisfies a(n+m) <= c^(2(n+m)) a(n) a(m) with "
       "c = max{1, K2/(b(0) K1^2), 2 c2/c1}")
def _c2_from_near_b2(ctx: SuiteContext, report: VerificationReport) -> None:
    _c_suite(ctx, report, "nearB2", "C2")


@suite("c3-from-near-b2tilde",
       "a sequence with near-B2tilde and a(0) <= 1 satisfies a(n) a(m) <= c^(2(n+m)) a(n+m) with "
       "c = max{1, K2^2 b(0)/K1, 2 c2/c1}")
def _c3_from_near_b2tilde(ctx: SuiteContext, report: VerificationReport) -> None:
    _c_suite(ctx, report, "nearB2tilde", "C3")


def _c_suite(ctx: SuiteContext, report: VerificationReport, near: str, target: str) -> None:
    n_max = int(ctx["n_max"])
    for spec, seq in ctx.sequences():
        la = seq.log_prefix(n_max)
        hyp_ok = la[0] >= -1e-12 if target == "C2" else la[0] <= 1e-12
        report.add_verdict(f"{spec} a(0) hypothesis", hyp_ok, log_a0=float(la[0]))
        got = _near_constant(seq, near, n_max)
        if isinstance(got, str):
            report.add_verdict(f"{spec} {near}", False, reason=got)
            continue
        c, _ = got
        lc = math.log(c)
        worst = math.inf
        for s in range(n_max + 1):
            for i in range(s + 1):
                if target == "C2":
                    m = log_slack(la[s], 2 * s * lc + la[i] + la[s - i])
                else:
                    m = log_slack(la[i] + la[s - i], 2 * s * lc + la[s])
                worst = min(worst, m)
        report.add(f"{spec} constructive constant", worst, c=c)
        res = check(seq, target, n_max)
        report.add_verdict(f"{spec} {target} grid check", res.passed, check=res.to_dict())


@suite("b1-near-b2", "B1 holds exactly when near-B2 holds, and B1tilde exactly when near-B2tilde holds")
def _b1_near_b2(ctx: SuiteContext, report: VerificationReport) -> None:
    n_max = int(ctx["n_max"])
    for spec, seq in ctx.sequences():
        for left, right in (("B1", "nearB2"), ("B1tilde", "nearB2tilde")):
            a = check(seq, left, n_max)
            b = check(seq, right, n_max)
            report.add_verdict(f"{spec} {left} <=> {right}", a.passed == b.passed,
                               verdicts={left: a.verdict, right: b.verdict})


@suite("stirling-sandwich", "e^-1 2^(-n/2) n! <= (n/e)^n <= n! <= e sqrt(n) (n/e)^n")
def _stirling_sandwich(ctx: SuiteContext, report: VerificationReport) -> None:
    for n in range(int(ctx["n_max"]) + 1):
        lf = math.lgamma(n + 1)
        mid = n * math.log(n) - n if n else 0.0
        lower = log_slack(-1.0 - 0.5 * n * math.log(2.0) + lf, mid)
        upper = log_slack(mid, lf)
        cases = [lower, upper]
        if n >= 1:
            cases.append(log_slack(lf, 1.0 + 0.5 * math.log(n) + mid))
        report.add(f"n={n}", min(cases))


# ---------------------------------------------------------------------------
# Fock model


def _exp_vector_norm_case(report, model, seq, spec, vec, truncation, grade):
    r = model.norm(vec, grade) ** 2
    got = fm.norm(fm.renorm_exp(vec, truncation), model, grade, "sequence", seq)
    full = generating_function(seq, "direct", r)
    partial = math.exp(0.5 * float(np.logaddexp.reduce(
        [seq.log_weight(n) - math.lgamma(n + 1) + n * math.log(r) for n in range(truncation + 1)]))) if r > 0 else 1.0
    report.add_error(f"{spec} |z|^2={r:.4f}", rel_err(got, math.sqrt(full)),
                     truncated_series_error=rel_err(got, partial))


@suite("exp-vector-norm",
       "the weighted norm of the renormalised exponential of z equals the square root of the generating "
       "function at |z|^2")
def _exp_vector_norm(ctx: SuiteContext, report: VerificationReport) -> None:
    model = ctx.model()
    grade = float(ctx["p"])
    for spec, seq in ctx.sequences():
        for _ in range(int(ctx["trials"])):
            r = float(ctx.rng.uniform(0.0, ctx["r_max"]))
            vec = math.sqrt(r) * unit_direction(ctx.rng, model, grade)
            _exp_vector_norm_case(report, model, seq, spec, vec, int(ctx["truncation"]), grade)


@suite("norm-sandwich",
       "for q at least p + log 2 / (2 log(1/decay)) the dual-weighted norms sit between the ordinary ones: "
       "e^-1 |F|_{-q,(u)} <= |F|_{-p,u*} <= |F|_{-p,(u)} and |f|_{p,u} <= |f|_{p,(u*)} <= e |f|_{q,u}")
def _norm_sandwich(ctx: SuiteContext, report: VerificationReport) -> None:
    model = ctx.model()
    low = float(ctx["p"])
    high = low + model.sandwich_gap()
    report.notes["q"] = high
    for spec, growth in ctx.functions():
        for trial in range(int(ctx["trials"])):
            scale = math.exp(ctx.rng.uniform(-1.0, 1.0))
            x = fm.random_expansion(ctx.rng, model.d, int(ctx["degree"]), scale)
            gen_q = fm.norm(x, model, -high, "generalized", growth)
            gen_dual = fm.norm(x, model, -low, "generalized_dual", growth)
            gen_p = fm.norm(x, model, -low, "generalized", growth)
            test_p = fm.norm(x, model, low, "test", growth)
            test_dual = fm.norm(x, model, low, "test_dual", growth)
            test_q = fm.norm(x, model, high, "test", growth)
            report.add(f"{spec} #{trial} generalized lower", slack(gen_q / math.e, gen_dual))
            report.add(f"{spec} #{trial} generalized upper", slack(gen_dual, gen_p))
            report.add(f"{spec} #{trial} test lower", slack(test_p, test_dual))
            report.add(f"{spec} #{trial} test upper", slack(test_dual, math.e * test_q))


@suite("wick-s-multiplicative",
       "the S-transform turns the Wick product into the pointwise product, and the Wick product is "
       "associative and commutative")
def _wick_s_multiplicative(ctx: SuiteContext, report: VerificationReport) -> None:
    d, degree = int(ctx["d"]), int(ctx["degree"])
    for trial in range(int(ctx["trials"])):
        x = fm.random_expansion(ctx.rng, d, degree)
        y = fm.random_expansion(ctx.rng, d, degree)
        w = fm.wick_product(x, y)
        worst = 0.0
        for _ in range(int(ctx["points"])):
            vec = ctx.rng.standard_normal(d) + 1j * ctx.rng.standard_normal(d)
            worst = max(worst, rel_err(fm.s_transform(w, vec), fm.s_transform(x, vec) * fm.s_transform(y, vec)))
        report.add_error(f"pair #{trial}", worst)
    for trial in range(int(ctx["triples"])):
        x, y, z = (fm.random_expansion(ctx.rng, d, degree) for _ in range(3))
        left = fm.wick_product(fm.wick_product(x, y), z)
        right = fm.wick_product(x, fm.wick_product(y, z))
        size = max(float(np.max(np.abs(k))) for k in left.kernels)
        report.add_error(f"associativity #{trial}", left.max_abs_diff(right) / size)
        report.add_error(f"commutativity #{trial}", fm.wick_product(x, y).max_abs_diff(fm.wick_product(y, x)) / size)


@suite("operator-identities",
       "pointwise product, translation, scaling, Gauss transform and differentiation act on evaluations as "
       "expected; G_{1,1} is the S-transform and G_{i,1} maps ordinary exponentials to renormalised ones")
def _operator_identities(ctx: SuiteContext, report: VerificationReport) -> None:
    d, degree = int(ctx["d"]), int(ctx["degree"])
    rng = ctx.rng
    small = int(ctx["product_degree"])
    cvec = lambda: rng.standard_normal(d) + 1j * rng.standard_normal(d)  # noqa: E731
    for i in range(int(ctx["points"])):
        x = fm.random_expansion(rng, d, small)
        y = fm.random_expansion(rng, d, small)
        at = rng.standard_normal(d)
        report.add_error(f"pointwise #{i}", rel_err(fm.evaluate(fm.pointwise_product(x, y), at),
                                                    fm.evaluate(x, at) * fm.evaluate(y, at)))
    for i in range(int(ctx["points"])):
        x = fm.random_expansion(rng, d, degree)
        shift, at = cvec(), cvec()
        report.add_error(f"translation #{i}", rel_err(fm.evaluate(fm.translation(shift, x), at), fm.evaluate(x, at + shift)))
    for i in range(int(ctx["points"])):
        x = fm.random_expansion(rng, d, degree)
        z = complex(rng.standard_normal(), rng.standard_normal())
        at = cvec()
        report.add_error(f"scaling #{i}", rel_err(fm.evaluate(fm.scaling(z, x), at), fm.evaluate(x, z * at)))
    for i in range(int(ctx["points"])):
        x = fm.random_expansion(rng, d, degree)
        at = rng.standard_normal(d)
        report.add_error(f"G(1,1) = S #{i}", rel_err(fm.evaluate(fm.fourier_gauss(1.0, 1.0, x), at), fm.s_transform(x, at)))
    for i in range(int(ctx["points"])):
        vec = 0.5 * cvec()
        plain = fm.plain_exp(vec, degree)
        target = fm.renorm_exp(vec, degree)
        size = max(float(np.max(np.abs(k))) for k in target.kernels)
        report.add_error(f"G(i,1) on exponential #{i}", fm.renormalizing_operator(plain).max_abs_diff(target) / size)
    for i in range(int(ctx["points"])):
        vec, direction = 0.5 * cvec(), cvec()
        x = fm.renorm_exp(vec, degree)
        expected = fm.renorm_exp(vec, degree - 1).scale(complex(np.dot(direction, vec))).padded(degree)
        size = max(float(np.max(np.abs(k))) for k in expected.kernels)
        report.add_error(f"differentiation of exponential #{i}", fm.diff_op(direction, x).max_abs_diff(expected) / size)


@dataclass
class _ForwardConstants:
    c: float
    dilation: float
    certificate: dict[str, Any]


def _forward_constants(growth: GrowthFunction, r_max: float, points: int) -> _ForwardConstants | Counterexample:
    dual = dual_of(growth)
    res = equivalence_witness(dual, reciprocal_series_growth(growth), r_max, points)
    if isinstance(res, Counterexample):
        return res
    return _ForwardConstants(res.c2, res.a2, dataclasses.asdict(res))


@suite("generalized-growth-bound",
       "|S F(z)| <= |F|_{-p,(u)} (sum r^n/(leg(n) (n!)^2))^(1/2) <= |F|_{-p,(u)} sqrt(c) u*(a |z|_p^2)^(1/2) "
       "for a generalized function F")
def _generalized_growth_bound(ctx: SuiteContext, report: VerificationReport) -> None:
    model = ctx.model()
    grade = float(ctx["p"])
    r_max = float(ctx["r_max"])
    for spec, growth in ctx.functions():
        consts = _forward_constants(growth, r_max, int(ctx["points"]))
        if isinstance(consts, Counterexample):
            report.add_verdict(f"{spec} equivalence constants", False, counterexample=dataclasses.asdict(consts))
            continue
        report.notes[f"constants[{spec}]"] = consts.certificate
        dual = dual_of(growth)
        for trial in range(int(ctx["trials"])):
            x = fm.random_expansion(ctx.rng, model.d, int(ctx["degree"]), math.exp(ctx.rng.uniform(-1.0, 1.0)))
            r = float(ctx.rng.uniform(0.0, r_max))
            vec = math.sqrt(r) * unit_direction(ctx.rng, model, grade)
            lhs = safe_log(abs(fm.s_transform(x, vec)))
            nrm = math.log(fm.norm(x, model, -grade, "generalized", growth))
            mid = nrm + 0.5 * math.log(reciprocal_series(growth, r))
            top = nrm + 0.5 * (math.log(consts.c) + dual.log_eval(consts.dilation * r))
            report.add(f"{spec} #{trial} series bound", log_slack(lhs, mid), r=r)
            report.add(f"{spec} #{trial} dual bound", log_slack(lhs, top), r=r)


@suite("test-growth-bound",
       "|S f(z)| <= |f|_{p,u} (sum leg(n) r^n)^(1/2) <= |f|_{p,u} sqrt(2e/log 2) u(2 |z|_{-p}^2)^(1/2) "
       "for a test function f")
def _test_growth_bound(ctx: SuiteContext, report: VerificationReport) -> None:
    model = ctx.model()
    grade = float(ctx["p"])
    r_max = float(ctx["r_max"])
    for spec, growth in ctx.functions():
        for trial in range(int(ctx["trials"])):
            x = fm.random_expansion(ctx.rng, model.d, int(ctx["degree"]), math.exp(ctx.rng.uniform(-1.0, 1.0)))
            r = float(ctx.rng.uniform(0.0, r_max))
            vec = math.sqrt(r) * unit_direction(ctx.rng, model, -grade)
            lhs = safe_log(abs(fm.s_transform(x, vec)))
            nrm = math.log(fm.norm(x, model, grade, "test", growth))
            mid = nrm + 0.5 * math.log(legendre_series(growth, r))
            top = nrm + math.log(SQRT_2E_OVER_LOG2) + 0.5 * growth.log_eval(2.0 * r)
            report.add(f"{spec} #{trial} series bound", log_slack(lhs, mid), r=r)
            report.add(f"{spec} #{trial} growth bound", log_slack(lhs, top), r=r)


def _converse(ctx: SuiteContext, report: VerificationReport, generalized: bool) -> None:
    """Exponential-vector certificates for the two converse estimates.

    For ``F(z) = exp(<tilt, z>)`` the growth certificate is
    ``K = sup_t exp(s t) g(a t^2)^(-1/2)`` with ``s`` the norm of ``tilt`` and
    ``g`` the dual transform (generalized side) or ``u`` itself (test side).
    """
    model = ctx.model()
    grade = float(ctx["p"])
    gap = float(ctx["gap"])
    truncation = int(ctx["truncation"])
    if generalized:
        outer, inner = grade + gap, grade
        hs2 = fm.hs_norm(model, outer, inner) ** 2
    else:
        outer, inner = grade - gap, grade
        if outer < 0:
            raise ConfigError("the test-side converse needs p >= gap")
        hs2 = fm.hs_norm(model, inner, outer) ** 2
    report.notes["hs_norm_squared"] = hs2
    for spec, growth in ctx.functions():
        envelope = dual_of(growth) if generalized else growth
        for target in ctx["targets"]:
            dilation = float(target) / (math.e**2 * hs2)
            ell_env = [legendre(envelope, n).log_value for n in range(truncation + 1)]
            for strength in ctx["strengths"]:
                for trial in range(int(ctx["trials"])):
                    label = f"{spec} target={target:g} s={strength:g} #{trial}"
                    # tilt pairs with z in the grade-`inner` space, so its size is measured at -inner
                    sign = -1.0 if generalized else 1.0
                    tilt = float(strength) * unit_direction(ctx.rng, model, sign * inner)
                    log_k = sup_of_linear_minus_half_log(float(strength), envelope.log_eval, dilation)
                    bound = log_k - 0.5 * math.log1p(-float(target))
                    r_outer = model.norm(tilt, sign * outer) ** 2
                    if generalized:
                        full = 0.5 * math.log(legendre_series(growth, r_outer))
                    else:
                        full = 0.5 * math.log(reciprocal_series(growth, r_outer))
                    report.add(f"{label} norm", log_slack(full, bound), log_K=log_k, log_norm=full)
                    if generalized:
                        dual_norm = fm.norm(fm.renorm_exp(tilt, truncation), model, -outer, "generalized_dual", growth)
                        report.add(f"{label} dual-weighted norm", log_slack(math.log(dual_norm), bound))
                    x = fm.renorm_exp(tilt, truncation)
                    worst, at = math.inf, 0
                    for n in range(truncation + 1):
                        lhs = safe_log(fm.kernel_norm_sq(model, x.kernel(n), n, sign * outer))
                        rhs = (2 * log_k - 2 * math.lgamma(n + 1) + n * math.log(dilation)
                               + (2 * n * math.log(n) if n else 0.0) + ell_env[n] + n * math.log(hs2))
                        m = log_slack(lhs, rhs)
                        if m < worst:
                            worst, at = m, n
                    report.add(f"{label} kernel chain", worst, tightest_degree=at)


@suite("generalized-converse",
       "if |S F(z)| <= K u*(a |z|_p^2)^(1/2) then |F|_{-q,(u)} <= K (1 - a e^2 |i_{q,p}|_HS^2)^(-1/2) and "
       "|f_n|_{-q}^2 <= K^2/(n!)^2 a^n n^(2n) leg_dual(n) |i_{q,p}|_HS^(2n)")
def _generalized_converse(ctx: SuiteContext, report: VerificationReport) -> None:
    _converse(ctx, report, generalized=True)


@suite("test-converse",
       "if |S f(z)| <= K u(a |z|_{-p}^2)^(1/2) then |f|_{q,u} <= K (1 - a e^2 |i_{p,q}|_HS^2)^(-1/2) for q < p, "
       "with the matching kernel-level chain")
def _test_converse(ctx: SuiteContext, report: VerificationReport) -> None:
    _converse(ctx, report, generalized=False)


@suite("wick-product-bound",
       "the Wick product is bounded from two copies of the -p norm into the -gamma norm: "
       "|F <> G|_{-gamma,(u)} <= C |F|_{-p,(u)} |G|_{-p,(u)}")
def _wick_product_bound(ctx: SuiteContext, report: VerificationReport) -> None:
    model = ctx.model()
    degree = int(ctx["degree"])
    horizon = int(ctx["horizon"])
    for spec, growth in ctx.functions():
        leg = np.array([legendre(growth, n).log_value for n in range(2 * horizon + 1)])
        lf = log_factorial(np.arange(2 * horizon + 1))
        for grade in ctx["grades"]:
            gamma, log_c = _search_gamma(leg, lf, float(grade), model.decay, horizon)
            report.notes[f"constants[{spec}, p={grade}]"] = {"gamma": gamma, "C": math.exp(log_c)}
            for trial in range(int(ctx["trials"])):
                x = fm.random_expansion(ctx.rng, model.d, degree, math.exp(ctx.rng.uniform(-1.0, 1.0)))
                y = fm.random_expansion(ctx.rng, model.d, degree, math.exp(ctx.rng.uniform(-1.0, 1.0)))
                lhs = math.log(fm.norm(fm.wick_product(x, y), model, -gamma, "generalized", growth))
                rhs = (log_c + math.log(fm.norm(x, model, -float(grade), "generalized", growth))
                       + math.log(fm.norm(y, model, -float(grade), "generalized", growth)))
                report.add(f"{spec} p={grade} #{trial}", log_slack(lhs, rhs), gamma=gamma)


def _search_gamma(leg: np.ndarray, lf: np.ndarray, grade: float, decay: float, horizon: int) -> tuple[int, float]:
    """Smallest integer ``gamma >= p`` whose Cauchy-Schwarz row sums stop growing.

    Row ``n`` sums ``M_jk^2`` over ``j + k = n`` with
    ``M_jk = sqrt(leg(n)) n! decay^((gamma-p) n) / (sqrt(leg(j)) j! sqrt(leg(k)) k!)``;
    the bound is ``C^2 = max_n`` of the row sums up to ``horizon``.
    """
    gamma = math.ceil(grade)
    while True:
        rows = []
        for n in range(horizon + 1):
            j = np.arange(n + 1)
            logm2 = (leg[n] + 2 * lf[n] + 2 * (gamma - grade) * n * math.log(decay)
                     - leg[j] - 2 * lf[j] - leg[n - j] - 2 * lf[n - j])
            rows.append(float(np.logaddexp.reduce(logm2)))
        rows_arr = np.array(rows)
        upper = rows_arr[horizon // 2:]
        if np.all(np.diff(upper) <= 0):
            return gamma, 0.5 * float(rows_arr.max())
        gamma += 1
        if gamma > grade + 50:
            raise ConfigError("no gamma found within 50 steps")


# ---------------------------------------------------------------------------
# intrinsic topology and Gaussian integrals


def _theta_operator_norm(model: fm.SpaceModel, degree: int, growth: GrowthFunction, src: float, dst: float) -> float:
    """Operator norm of the renormalising operator from the ``src`` test norm to the ``dst`` one."""
    blocks = [fm.canonical(model.d, n).shape[0] for n in range(degree + 1)]
    offsets = np.concatenate([[0], np.cumsum(blocks)])
    dim = int(offsets[-1])
    weights_src = np.concatenate([model.kernel_weights(n, src) / math.exp(legendre(growth, n).log_value)
                                  for n in range(degree + 1)])
    weights_dst = np.concatenate([model.kernel_weights(n, dst) / math.exp(legendre(growth, n).log_value)
                                  for n in range(degree + 1)])
    mat = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        n = int(np.searchsorted(offsets, col, side="right") - 1)
        ks = [np.zeros(b, dtype=complex) for b in blocks]
        ks[n][col - offsets[n]] = 1.0
        image = fm.renormalizing_operator(fm.ChaosExpansion(model.d, ks))
        mat[:, col] = np.concatenate([image.kernel(m) for m in range(degree + 1)])
    scaled_mat = np.sqrt(weights_dst)[:, None] * mat / np.sqrt(weights_src)[None, :]
    return float(np.linalg.norm(scaled_mat, 2))


def _intrinsic_constant(ctx: SuiteContext, model: fm.SpaceModel, growth: GrowthFunction) -> tuple[float, float, float]:
    grade = float(ctx["p"])
    mid = grade + model.sandwich_gap()
    upper = mid + float(ctx["extra_grade"])
    op = _theta_operator_norm(model, int(ctx["degree"]), growth, upper, mid)
    return op * SQRT_2E_OVER_LOG2, mid, upper


@suite("intrinsic-upper",
       "the sup norm sup_x |f(x)| u(|x|_{-p}^2)^(-1/2) is at most C_{p,q} |f|_{q,u}, with C_{p,q} = "
       "sqrt(2e/log 2) times the norm of the renormalising operator")
def _intrinsic_upper(ctx: SuiteContext, report: VerificationReport) -> None:
    model = ctx.model()
    grade = float(ctx["p"])
    for spec, growth in ctx.functions():
        const, mid, upper = _intrinsic_constant(ctx, model, growth)
        report.notes[f"constants[{spec}]"] = {"C": const, "intermediate_grade": mid, "q": upper}
        for trial in range(int(ctx["trials"])):
            x = fm.random_expansion(ctx.rng, model.d, int(ctx["degree"]), math.exp(ctx.rng.uniform(-1.0, 1.0)))
            est = fm.intrinsic_norm_estimate(x, model, grade, growth, ctx.rng, int(ctx["starts"]), int(ctx["steps"]),
                                             int(ctx["polish"]))
            rhs = const * fm.norm(x, model, upper, "test", growth)
            report.add(f"{spec} #{trial}", slack(est.lower_bound, rhs), estimate=est.lower_bound)


@suite("pointwise-growth",
       "test functions grow at most like |f(x)| <= C_{p,q} |f|_{q,u} u(|x|_{-p}^2)^(1/2)")
def _pointwise_growth(ctx: SuiteContext, report: VerificationReport) -> None:
    model = ctx.model()
    grade = float(ctx["p"])
    for spec, growth in ctx.functions():
        const, _, upper = _intrinsic_constant(ctx, model, growth)
        report.notes[f"C[{spec}]"] = const
        for trial in range(int(ctx["trials"])):
            x = fm.random_expansion(ctx.rng, model.d, int(ctx["degree"]), math.exp(ctx.rng.uniform(-1.0, 1.0)))
            nrm = fm.norm(x, model, upper, "test", growth)
            radii = np.exp(ctx.rng.uniform(math.log(0.01), math.log(float(ctx["r_max"])), int(ctx["points"])))
            pts = np.array([math.sqrt(r) * unit_direction(ctx.rng, model, -grade) for r in radii])
            vals = np.abs(fm.evaluate_batch(x, pts))
            worst = min(log_slack(safe_log(v), math.log(const * nrm) + 0.5 * growth.log_eval(float(r)))
                        for v, r in zip(vals, radii))
            report.add(f"{spec} #{trial}", worst)


@suite("intrinsic-lower",
       "|f|_{p,u} <= L_{p,q} sup_x |f(x)| u(|x|_{-q}^2)^(-1/2) with L_{p,q} = sqrt(c1) (1 - 4 e^2 |i_{q,p}|_HS^2)^(-1/2) "
       "int exp(2 c2 |x|_{-q}^2) dgauss, checked on exponential vectors")
def _intrinsic_lower(ctx: SuiteContext, report: VerificationReport) -> None:
    model = ctx.model()
    grade, upper = float(ctx["p"]), float(ctx["q"])
    for spec, growth in ctx.functions():
        hida = fm.hida_check(model, fm.standard_gaussian(model.d), grade, growth, upper)
        if hida.norm_constant is None:
            report.add_verdict(f"{spec} norm_constant finite", False)
            continue
        report.notes[f"norm_constant[{spec}]"] = hida.norm_constant
        for trial in range(int(ctx["trials"])):
            radius = float(ctx.rng.uniform(0.0, ctx["radius"]))
            tilt = radius * unit_direction(ctx.rng, model, upper)
            lhs = 0.5 * math.log(reciprocal_series(growth, model.norm(tilt, grade) ** 2))
            log_sup = _exp_vector_sup(model, tilt, upper, growth)
            report.add(f"{spec} #{trial}", log_slack(lhs, math.log(hida.norm_constant) + log_sup))
    # estimator against the closed form on a small exactness tier
    est_model = fm.SpaceModel(int(ctx["estimator_d"]))
    growth = parse_function_spec("exp")
    for trial in range(int(ctx["estimator_trials"])):
        tilt = float(ctx["estimator_radius"]) * unit_direction(ctx.rng, est_model, float(ctx["estimator_grade"]))
        vec = fm.renorm_exp(tilt, int(ctx["estimator_truncation"]))
        est = fm.intrinsic_norm_estimate(vec, est_model, float(ctx["estimator_grade"]), growth, ctx.rng,
                                         int(ctx["starts"]), int(ctx["steps"]), int(ctx["polish"]))
        closed = _exp_vector_sup(est_model, tilt, float(ctx["estimator_grade"]), growth)
        report.add_error(f"estimator vs closed form #{trial}", abs(est.log_lower_bound - closed),
                         tol=float(ctx["estimator_tolerance"]))


def _exp_vector_sup(model: fm.SpaceModel, tilt: np.ndarray, grade: float, growth: GrowthFunction) -> float:
    """``log sup_x |exp(<x, tilt> - <tilt, tilt>/2)| exp(-|x|_{-grade}^2 / 2)`` for ``u = e^r``.

    Mode by mode the maximiser is ``x_j = w_j^(2 grade) conj(eta_j)``.
    """
    if growth.kind != "pure_exp":
        raise ConfigError("the closed-form sup is available for u = e^r only")
    w = model.weight_array ** (2.0 * grade)
    return float(0.5 * np.sum(w * np.abs(tilt) ** 2) - 0.5 * np.real(np.sum(tilt * tilt)))


@suite("gaussian-exp-integral",
       "int exp(2 c2 |x|_{-q}^2) dgauss equals prod_j (1 - 4 c2 w_j^(-2q))^(-1/2) for the standard Gaussian")
def _gaussian_exp_integral(ctx: SuiteContext, report: VerificationReport) -> None:
    model = ctx.model()
    grade, c2 = float(ctx["q"]), float(ctx["c2"])
    closed = fm.gaussian_exp_integral(model, grade, c2)
    samples = int(ctx["samples"])
    xs = ctx.rng.standard_normal((samples, model.d))
    vals = np.exp(2.0 * c2 * np.sum(model.weight_array ** (-2.0 * grade) * xs**2, axis=1))
    mc = float(vals.mean())
    report.add_error("Monte Carlo vs closed form", rel_err(mc, closed), closed_form=closed, monte_carlo=mc,
                     standard_error=float(vals.std() / math.sqrt(samples)))
    report.add_error("c2 = 0 gives 1", abs(fm.gaussian_exp_integral(model, grade, 0.0) - 1.0))


@suite("hida-measure",
       "a Gaussian measure is a Hida measure when int u(|x|_{-p}^2)^(1/2) dmeasure is finite; the envelope bound "
       "dominates the integral and L_{p,q} is finite once 4 e^2 |i_{q,p}|_HS^2 < 1")
def _hida_measure(ctx: SuiteContext, report: VerificationReport) -> None:
    model = ctx.model()
    grade, upper = float(ctx["p"]), float(ctx["q"])
    exp_growth = parse_function_spec("exp")
    res = fm.hida_check(model, fm.standard_gaussian(model.d), grade, exp_growth, upper)
    report.add_verdict("standard Gaussian with u = e^r integrable", res.integrable, bound=res.bound)
    report.add_verdict("norm_constant finite", res.norm_constant is not None and math.isfinite(res.norm_constant), norm_constant=res.norm_constant)
    bad = fm.hida_check(model, fm.standard_gaussian(model.d), 0.0, exp_growth)
    report.add_verdict("grade 0 rejected for u = e^r", (not bad.integrable) and bad.violating_mode == 0)
    variances = tuple(float(v) for v in ctx["variances"])
    measure = fm.GaussianMeasureSpec(variances)
    samples = int(ctx["samples"])
    xs = ctx.rng.standard_normal((samples, model.d)) * np.sqrt(np.asarray(variances))
    r = np.sum(model.weight_array ** (-2.0 * grade) * xs**2, axis=1)
    for spec, growth in ctx.functions():
        res = fm.hida_check(model, measure, grade, growth)
        vals = np.exp(0.5 * growth.log_eval_many(r))
        mc, se = float(vals.mean()), float(vals.std() / math.sqrt(samples))
        # the bound must dominate the sample mean up to four standard errors
        report.add(f"{spec} envelope bound", slack(mc - 4.0 * se, res.bound), monte_carlo=mc, bound=res.bound)
