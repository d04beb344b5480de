"""Command-line front end: ``growthspace transform | check | fock | verify``.

Exit codes are 0 when everything passes, 1 when a check or suite finds a
violation and 2 for usage or configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import fock_model as fm
from .errors import ConfigError, GrowthSpaceError
from .growth_functions import (
    check_condition,
    dual_legendre,
    function_from_config,
    legendre_series_sum,
    legendre_table,
    parse_function_spec,
    reciprocal_series_sum,
)
from .results import VerificationReport, to_jsonable
from .suites import CONFIG_FUNCTION, REGISTRY, effective_params, load_defaults, run_suite
from .weight_sequences import check, parse_sequence_spec

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
GROWTH_CONDITIONS = ("C_plus_log", "C_plus_half", "U0", "U1", "U2", "U3", "log_exp_convex", "log_xk_convex")
MODEL_KEYS = ("d", "degree", "mode_weights")


class UsageError(Exception):
    """Raised for bad command-line input; mapped to exit code 2."""


# ---------------------------------------------------------------------------
# argument helpers


def parse_grid(text: str) -> list[float]:
    """``1..10`` (integers), ``0.5:4:8`` (8 evenly spaced points) or ``0.5,1,2``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            return [float(v) for v in range(lo, hi + 1)]
        if ":" in text:
            lo, hi, count = text.split(":")
            return [float(v) for v in np.linspace(float(lo), float(hi), int(count))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}") from exc


def emit(rows: list[dict[str, Any]], fmt: str, out: Path | None) -> None:
    if fmt == "json":
        text = json.dumps(to_jsonable(rows), indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


# ---------------------------------------------------------------------------
# transform


def cmd_transform(args: argparse.Namespace) -> int:
    growth = parse_function_spec(args.fn)
    modes = [m for m in ("legendre", "dual", "lfn", "reciprocal") if getattr(args, m)]
    if len(modes) != 1:
        raise UsageError("choose exactly one of --legendre, --dual, --lfn, --reciprocal")
    mode = modes[0]
    out = Path(args.out) if args.out else None
    if mode == "legendre":
        if args.t is None:
            raise UsageError("--legendre needs --t")
        table = legendre_table(growth, parse_grid(args.t))
        if args.format == "csv":
            text = table.to_csv()
            sys.stdout.write(text) if out is None else out.write_text(text)
        else:
            rows = [{"t": t, "log_legendre": lv, "r_star": rs} for (t, lv), rs in zip(table.values, table.argmin_witnesses)]
            emit(rows, "json", out)
        return EXIT_OK
    if args.r is None:
        raise UsageError(f"--{mode} needs --r")
    rows = []
    for r in parse_grid(args.r):
        if mode == "dual":
            val = dual_legendre(growth, r)
            rows.append({"r": r, "value": math.exp(val.log_value), "log_value": val.log_value + 0.0, "s_star": val.s_star})
        else:
            total = (legendre_series_sum if mode == "lfn" else reciprocal_series_sum)(growth, r)
            rows.append({"r": r, "value": total.value, "log_value": total.log_value, "terms": total.terms,
                         "log_tail_bound": total.log_tail_bound})
    emit(rows, args.format, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# check


def cmd_check(args: argparse.Namespace) -> int:
    if (args.fn is None) == (args.seq is None):
        raise UsageError("give exactly one of --fn or --seq")
    if args.cond is None:
        raise UsageError("--cond is required")
    if args.fn is not None:
        if args.cond not in GROWTH_CONDITIONS:
            raise UsageError(f"unknown growth-function condition {args.cond!r}")
        result = check_condition(parse_function_spec(args.fn), args.cond, args.k)
        subject = args.fn
    else:
        seq = parse_sequence_spec(args.seq)
        if args.cond in GROWTH_CONDITIONS:
            # a growth condition on a derived sequence is a statement about the function behind it
            if seq.origin != "from_growth":
                raise UsageError(f"{args.cond} applies to growth functions; {args.seq} has none")
            result = check_condition(seq.params["growth"], args.cond, args.k)
        else:
            result = check(seq, args.cond, args.n)
        subject = args.seq
    doc = {"subject": subject, **result.to_dict()}
    text = json.dumps(doc, indent=2) + "\n"
    sys.stdout.write(text) if not args.out else Path(args.out).write_text(text)
    return EXIT_OK if result.passed else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# fock: a small demonstration of the finite model


def cmd_fock(args: argparse.Namespace) -> int:
    growth = parse_function_spec(args.fn)
    model = fm.SpaceModel(args.d)
    rng = np.random.default_rng(args.seed)
    expansion = fm.random_expansion(rng, args.d, args.degree)
    grade = args.p
    point = rng.standard_normal(args.d)
    doc = {
        "d": args.d,
        "degree": args.degree,
        "seed": args.seed,
        "function": growth.name,
        "grade": grade,
        "norms": {
            "test": fm.norm(expansion, model, grade, "test", growth),
            "test_dual": fm.norm(expansion, model, grade, "test_dual", growth),
            "generalized": fm.norm(expansion, model, -grade, "generalized", growth),
            "generalized_dual": fm.norm(expansion, model, -grade, "generalized_dual", growth),
        },
        "point": point,
        "value": fm.evaluate(expansion, point),
        "s_transform": fm.s_transform(expansion, point),
        "wick_square_s_transform": fm.s_transform(fm.wick_product(expansion, expansion), point),
        "expectation": fm.gauss_expectation(expansion),
    }
    if args.show_kernels:
        doc["expansion"] = expansion.to_json()
    sys.stdout.write(json.dumps(to_jsonable(doc), indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def load_config(path: str | None) -> dict[str, Any]:
    """Read and validate a config file; only [model], [function] and [suites] are allowed."""
    if path is None:
        return {}
    p = Path(path)
    try:
        doc = tomllib.loads(p.read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    unknown = set(doc) - {"model", "function", "suites"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    bad_model = set(doc.get("model", {})) - set(MODEL_KEYS)
    if bad_model:
        raise ConfigError(f"unknown keys in [model]: {sorted(bad_model)}")
    suites = doc.get("suites", {})
    for key, table in suites.items():
        if key not in REGISTRY:
            raise ConfigError(f"unknown suite in [suites]: {key!r}")
        if not isinstance(table, dict):
            raise ConfigError(f"[suites.{key}] must be a table")
    if "function" in doc:
        table = dict(doc["function"])
        try:
            function_from_config(table, p.parent)
        except (ValueError, KeyError, TypeError, OSError, GrowthSpaceError) as exc:
            raise ConfigError(f"bad [function] table: {exc}") from exc
        table["_base_dir"] = str(p.parent.resolve())
        doc["function"] = table
    return doc


def suite_overrides(key: str, config: dict[str, Any], args: argparse.Namespace) -> dict[str, Any]:
    """Merge [model], then [suites.key], then command-line flags, keeping only declared keys."""
    declared = load_defaults()["suites"][key]
    merged: dict[str, Any] = {}
    for name, value in config.get("model", {}).items():
        if name in declared:
            merged[name] = value
    if "function" in config and "functions" in declared:
        merged["functions"] = [CONFIG_FUNCTION]
    merged.update(config.get("suites", {}).get(key, {}))
    flags = {"functions": [args.fn] if args.fn else None, "sequences": [args.seq] if args.seq else None,
             "trials": args.trials, "d": args.d, "degree": args.degree}
    for name, value in flags.items():
        if value is not None and name in declared:
            merged[name] = value
    if "d" in merged and "mode_weights" in declared and "mode_weights" not in merged:
        if int(merged["d"]) != int(declared["d"]) and declared["mode_weights"]:
            merged["mode_weights"] = []
    return merged


def _run_one(key: str, seed: int, overrides: dict[str, Any], function_table: dict[str, Any] | None
             ) -> VerificationReport:
    return run_suite(key, seed, overrides, function_table)


def write_report(report: VerificationReport, out_dir: Path, fmt: str) -> None:
    if fmt == "json":
        (out_dir / f"{report.suite}.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        return
    with (out_dir / f"{report.suite}.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["case", "margin", "passed"])
        for case in report.cases:
            writer.writerow([case["case"], repr(case["margin"]), case["passed"]])


def cmd_verify(args: argparse.Namespace) -> int:
    keys = list(REGISTRY) if args.keys in ([], ["all"]) else list(args.keys)
    if args.suite:
        keys = list(args.suite)
    unknown = [k for k in keys if k not in REGISTRY]
    if unknown:
        raise UsageError(f"unknown suite keys: {unknown}; available: {', '.join(REGISTRY)}")
    config = load_config(args.config)
    overrides = {k: suite_overrides(k, config, args) for k in keys}
    for k in keys:
        effective_params(k, overrides[k])  # reject unknown parameters before any work starts
    requested = {"--fn": args.fn, "--seq": args.seq, "--trials": args.trials, "--d": args.d, "--degree": args.degree}
    names = {"--fn": "functions", "--seq": "sequences", "--trials": "trials", "--d": "d", "--degree": "degree"}
    for flag, value in requested.items():
        if value is not None and not any(names[flag] in load_defaults()["suites"][k] for k in keys):
            raise UsageError(f"{flag} does not apply to any of the selected suites")

    function_table = config.get("function")
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    if args.jobs > 1 and len(keys) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_run_one, k, args.seed, overrides[k], function_table) for k in keys]
            reports = [f.result() for f in futures]
    else:
        reports = [_run_one(k, args.seed, overrides[k], function_table) for k in keys]

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = []
    for report in reports:
        report.timestamp = stamp
        write_report(report, out_dir, args.format)
        row = report.to_dict(include_cases=False)
        summary.append({k: row[k] for k in ("suite", "reference", "trials", "violations", "worst_margin", "tolerance")})
        status = "PASS" if report.passed else "FAIL"
        print(f"{status} {report.suite}: {report.trials} cases, {report.violations} violations, "
              f"worst margin {report.worst_margin:.3g}")
    doc = {"seed": args.seed, "timestamp": stamp, "suites": summary,
           "violations": sum(r.violations for r in reports)}
    if args.format == "json":
        (out_dir / "summary.json").write_text(json.dumps(to_jsonable(doc), indent=2) + "\n")
    else:
        with (out_dir / "summary.csv").open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(summary[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(to_jsonable(summary))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def cmd_list(args: argparse.Namespace) -> int:
    for key, entry in REGISTRY.items():
        print(f"{key}: {entry.reference}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="growthspace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="tabulate Legendre transforms, dual transforms and series")
    t.add_argument("--fn", required=True, help="growth function spec, e.g. exp or beta_exp:0.5")
    t.add_argument("--legendre", action="store_true", help="Legendre transform at --t")
    t.add_argument("--dual", action="store_true", help="dual Legendre transform at --r")
    t.add_argument("--lfn", action="store_true", help="series sum_n leg(n) r^n at --r")
    t.add_argument("--reciprocal", action="store_true", help="series sum_n r^n / (leg(n) (n!)^2) at --r")
    t.add_argument("--t", help="grid: 1..10, lo:hi:count or a comma list")
    t.add_argument("--r", help="grid in the same syntax as --t")
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.add_argument("--out")
    t.set_defaults(handler=cmd_transform)

    c = sub.add_parser("check", help="decide a growth or sequence condition on a grid")
    c.add_argument("--fn")
    c.add_argument("--seq", help="ones, factorial_power:b, bell:k or from-growth:<fn>")
    c.add_argument("--cond")
    c.add_argument("--n", type=int, default=60, help="largest index for sequence checks")
    c.add_argument("--k", type=int, default=2, help="exponent for log_xk_convex")
    c.add_argument("--out")
    c.set_defaults(handler=cmd_check)

    f = sub.add_parser("fock", help="norms and transforms of a random chaos expansion")
    f.add_argument("--fn", default="exp")
    f.add_argument("--d", type=int, default=3)
    f.add_argument("--degree", type=int, default=4)
    f.add_argument("--p", type=float, default=1.0)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--show-kernels", action="store_true")
    f.set_defaults(handler=cmd_fock)

    v = sub.add_parser("verify", help="run verification suites and write reports")
    v.add_argument("keys", nargs="*", help="suite keys, or 'all' (the default)")
    v.add_argument("--suite", action="append", help="suite key; may be repeated")
    v.add_argument("--config", help="TOML file with [model], [function] and [suites] sections")
    v.add_argument("--fn")
    v.add_argument("--seq")
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--d", type=int)
    v.add_argument("--degree", type=int)
    v.add_argument("--out", default="reports")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--jobs", type=int, default=1, help="worker processes; suites run in parallel")
    v.set_defaults(handler=cmd_verify)

    ls = sub.add_parser("list", help="list suite keys and the claim each one checks")
    ls.set_defaults(handler=cmd_list)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.handler(args)
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
