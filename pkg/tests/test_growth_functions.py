import math

import numpy as np
import pytest

from growthspace.errors import GrowthSpaceError
from growthspace.growth_functions import (
    Counterexample,
    EquivalenceCertificate,
    Flags,
    beta_exp,
    check_condition,
    conjugate_profile,
    convex_profile,
    custom,
    dual_legendre,
    dual_of,
    equivalence_witness,
    function_from_config,
    iterated_exp,
    legendre,
    legendre_series,
    legendre_series_sum,
    legendre_table,
    load_tabulated_csv,
    monotone_envelope,
    parse_function_spec,
    power,
    pure_exp,
    reciprocal_series,
    w_sqrt_log,
)


def test_exp_legendre_matches_closed_form():
    for n in (1, 2, 7, 25):
        got = legendre(pure_exp(), n)
        assert got.log_value == pytest.approx(n * (1 - math.log(n)), rel=1e-10, abs=1e-10)
        assert got.r_star == pytest.approx(n, rel=1e-6)


def test_legendre_at_zero_is_infimum():
    assert legendre(pure_exp(), 0.0).log_value == pytest.approx(0.0, abs=1e-12)


def test_legendre_table_csv_layout():
    text = legendre_table(pure_exp(), [1.0, 2.0]).to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "t,log_legendre,r_star"
    assert len(lines) == 3


@pytest.mark.parametrize("beta", [0.25, 0.5])
def test_dual_of_beta_family_flips_sign(beta):
    for r in (0.1, 3.0, 40.0):
        got = dual_legendre(beta_exp(beta), r).log_value
        assert got == pytest.approx(beta_exp(-beta).log_eval(r), rel=1e-7)


def test_dual_at_zero_is_one():
    assert dual_legendre(beta_exp(0.5), 0.0).log_value == pytest.approx(0.0, abs=1e-14)


def test_series_of_exp():
    # sum (e/n)^n r^n with the n = 0 term equal to one
    r = 2.0
    direct = 1.0 + sum((math.e / n) ** n * r**n for n in range(1, 80))
    assert legendre_series(pure_exp(), r) == pytest.approx(direct, rel=1e-10)
    total = legendre_series_sum(pure_exp(), r)
    assert total.log_tail_bound < math.log(direct) - 20


def test_reciprocal_series_is_finite_and_increasing():
    vals = [reciprocal_series(beta_exp(0.5), r) for r in (0.0, 1.0, 5.0)]
    assert vals[0] == pytest.approx(1.0)
    assert vals[0] < vals[1] < vals[2]


def test_iterated_exp_overflows_to_inf():
    assert iterated_exp(3).log_eval(1000.0) == math.inf
    assert iterated_exp(2).log_eval(0.0) == 0.0


def test_w_family_starts_at_one():
    assert w_sqrt_log(2).log_eval(0.0) == 0.0


def test_conditions_on_exp():
    assert check_condition(pure_exp(), "U2").passed
    assert check_condition(pure_exp(), "U3").passed
    assert not check_condition(iterated_exp(2), "U2").passed


def test_equivalence_of_exp_and_its_square():
    cert = equivalence_witness(pure_exp(), power(pure_exp(), 2.0), 50.0)
    assert isinstance(cert, EquivalenceCertificate)
    assert cert.a2 >= 2.0 - 1e-12


def test_non_equivalence_is_reported():
    res = equivalence_witness(pure_exp(), iterated_exp(2), 50.0, 200)
    assert isinstance(res, Counterexample)


def test_monotone_envelope_keeps_legendre():
    bumpy = custom(lambda r: (r - 2.0) ** 2, "bump", Flags(U0=True))
    env = monotone_envelope(bumpy)
    assert env.params["r_min"] == pytest.approx(2.0, abs=1e-6)
    for t in (0.5, 3.0):
        assert legendre(env, t).log_value == pytest.approx(legendre(bumpy, t).log_value, rel=1e-7)


def test_profile_conjugate_recovers_dual():
    g = beta_exp(0.5)
    conj = conjugate_profile(convex_profile(g))
    for r in (0.5, 4.0):
        assert 2 * conj(math.sqrt(r)) == pytest.approx(dual_legendre(g, r).log_value, rel=1e-7)


def test_spec_parsing():
    assert parse_function_spec("exp").name == "exp"
    assert parse_function_spec("beta_exp:0.5").name == "beta_exp:0.5"
    assert parse_function_spec("dual:exp").log_eval(1.0) == pytest.approx(dual_of(pure_exp()).log_eval(1.0))
    with pytest.raises(ValueError):
        parse_function_spec("nonsense")


def test_config_tables(tmp_path):
    csv_path = tmp_path / "u.csv"
    rs = np.linspace(0, 10, 101)
    csv_path.write_text("r,log_u\n" + "\n".join(f"{r},{r}" for r in rs))
    g = function_from_config({"kind": "tabulated", "path": "u.csv"}, tmp_path)
    assert g.log_eval(2.5) == pytest.approx(2.5)
    assert load_tabulated_csv(csv_path).log_eval(7.0) == pytest.approx(7.0)
    assert function_from_config({"kind": "beta_exp", "beta": 0.25}).name == "beta_exp:0.25"
    with pytest.raises(ValueError):
        function_from_config({"kind": "exp", "colour": "red"})


def test_errors_share_a_base():
    with pytest.raises(GrowthSpaceError):
        raise GrowthSpaceError("x")
