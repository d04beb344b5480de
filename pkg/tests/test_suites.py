import math

import pytest

from growthspace.errors import ConfigError
from growthspace.results import VerificationReport
from growthspace.suites import REGISTRY, effective_params, load_defaults, log_slack, run_suite


def test_every_suite_has_defaults_with_a_tolerance():
    defaults = load_defaults()["suites"]
    assert set(defaults) == set(REGISTRY)
    assert all("tolerance" in table for table in defaults.values())


def test_unknown_parameters_are_rejected():
    with pytest.raises(ConfigError):
        effective_params("dual-pair", {"colour": "blue"})
    with pytest.raises(ConfigError):
        effective_params("no-such-suite")


def test_reports_are_reproducible():
    a = run_suite("wick-s-multiplicative", 3, {"trials": 3, "points": 4, "triples": 2})
    b = run_suite("wick-s-multiplicative", 3, {"trials": 3, "points": 4, "triples": 2})
    c = run_suite("wick-s-multiplicative", 4, {"trials": 3, "points": 4, "triples": 2})
    assert a.to_dict() == b.to_dict()
    assert a.to_dict()["cases"] != c.to_dict()["cases"]


def test_report_echoes_effective_parameters():
    rep = run_suite("stirling-sandwich", 0, {"n_max": 10})
    assert rep.notes["parameters"]["n_max"] == 10
    assert rep.trials == 11 and rep.passed


def test_margin_conventions():
    rep = VerificationReport("x", "claim", 0, 1e-9)
    assert rep.add("inequality holds", 0.5)
    assert rep.add("within tolerance", -1e-10)
    assert not rep.add("violated", -1e-3)
    assert not rep.add("undefined", math.nan)
    assert rep.add_error("identity", 1e-12)
    assert not rep.add_error("identity off", 1e-6)
    assert rep.violations == 3
    assert rep.worst_margin < 0


def test_log_slack():
    assert log_slack(0.0, math.log(2.0)) == pytest.approx(0.5)
    assert log_slack(-math.inf, 0.0) == 1.0
    assert log_slack(1.0, 0.0) < 0


def test_config_function_is_used():
    table = {"kind": "beta_exp", "beta": 0.25}
    rep = run_suite("dual-legendre-identity", 1, {"functions": ["@config"], "ts": [1, 2]}, table)
    assert rep.passed and rep.trials == 2
    assert rep.notes["config_function"] == table
