import math

import numpy as np
import pytest

from growthspace.growth_functions import beta_exp, pure_exp
from growthspace.weight_sequences import (
    SequenceCertificate,
    SequenceCounterexample,
    bell_numbers,
    bell_triangle,
    check,
    explicit,
    factorial_power,
    find_near_witness,
    generating_function,
    ones,
    parse_sequence_spec,
    sequence_equivalence,
    stirling_sandwich_holds,
    weights_from_growth,
)


def test_bell_numbers_small_values():
    seq = bell_numbers(1, 10)
    assert [round(math.exp(seq.log_weight(n))) for n in range(7)] == [1, 1, 2, 5, 15, 52, 203]
    assert bell_triangle(6) == [1, 1, 2, 5, 15, 52, 203]


def test_second_order_bell_is_log_concave_over_factorial():
    assert check(bell_numbers(2, 40), "B2", 40).passed


def test_generating_function_of_ones_is_exponential():
    assert generating_function(ones(), "direct", 3.0) == pytest.approx(math.e**3, rel=1e-12)
    assert generating_function(ones(), "reciprocal", 3.0) == pytest.approx(math.e**3, rel=1e-12)


def test_weights_from_exp():
    seq = weights_from_growth(pure_exp())
    for n in (1, 5, 12):
        expected = -math.lgamma(n + 1) - n * (1 - math.log(n))
        assert seq.log_weight(n) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("cond", ["A1", "A2", "nearB2", "B2tilde"])
def test_weights_from_growth_conditions(cond):
    assert check(weights_from_growth(beta_exp(0.5)), cond, 60).passed


def test_factorial_power_conditions():
    assert check(factorial_power(1.0), "B2", 40).passed
    assert check(factorial_power(0.5), "C2", 40).passed


def test_sequence_equivalence_detects_geometric_factor():
    a = ones()
    b = explicit([3.0 * 2.0**n for n in range(31)])
    cert = sequence_equivalence(a, b, 30)
    assert isinstance(cert, SequenceCertificate)
    assert cert.K1 == pytest.approx(3.0)
    assert cert.c1 == pytest.approx(2.0)
    assert cert.c2 == pytest.approx(2.0)


def test_sequence_equivalence_rejects_factorial_growth():
    res = sequence_equivalence(ones(), factorial_power(1.0), 40)
    assert isinstance(res, SequenceCounterexample)


def test_near_witness_is_found_for_bell():
    found = find_near_witness(bell_numbers(1, 40), "nearB2", 40)
    assert not isinstance(found, list)
    label, logs, cert, res = found
    assert res.passed and logs.shape == (41,)


def test_stirling_sandwich():
    assert all(stirling_sandwich_holds(n) for n in range(0, 150))


def test_sequence_specs():
    assert parse_sequence_spec("ones").name == "ones"
    assert parse_sequence_spec("bell:2").params["k"] == 2
    assert parse_sequence_spec("from-growth:exp").origin == "from_growth"
    with pytest.raises(ValueError):
        parse_sequence_spec("primes")


def test_csv_export():
    lines = factorial_power(1.0).to_csv(3).strip().splitlines()
    assert len(lines) == 5
    assert np.isclose(float(lines[-1].split(",")[-1]), math.lgamma(4))
