import math

import numpy as np
import pytest

from growthspace import fock_model as fm
from growthspace.errors import DegreeCapExceeded
from growthspace.growth_functions import beta_exp, pure_exp
from growthspace.weight_sequences import generating_function, ones


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def test_index_tables_agree_with_binomials():
    for d, n in ((3, 2), (4, 3)):
        assert fm.canonical(d, n).shape[0] == math.comb(d + n - 1, n)
        assert fm.multiplicity(d, n).sum() == d**n


def test_model_defaults():
    m = fm.SpaceModel(4)
    assert m.mode_weights == (2.0, 4.0, 6.0, 8.0)
    assert m.sandwich_gap() == pytest.approx(0.5)
    with pytest.raises(ValueError):
        fm.SpaceModel(2, (3.0, 1.0))


def test_hs_norm():
    m = fm.SpaceModel(2)
    assert fm.hs_norm(m, 1.0, 0.0) == pytest.approx(math.sqrt(1 / 4 + 1 / 16))


def test_wick_product_is_multiplicative_under_s(rng):
    x = fm.random_expansion(rng, 3, 3)
    y = fm.random_expansion(rng, 3, 2)
    z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    w = fm.wick_product(x, y)
    assert fm.s_transform(w, z) == pytest.approx(fm.s_transform(x, z) * fm.s_transform(y, z), rel=1e-12)


def test_wick_product_respects_degree_cap(rng):
    x = fm.random_expansion(rng, 2, 6)
    with pytest.raises(DegreeCapExceeded):
        fm.wick_product(x, x, cap=10)


def test_renormalised_exponential_norm_matches_generating_function():
    m = fm.SpaceModel(3)
    z = np.array([0.3, -0.2, 0.1j])
    r = m.norm(z, 1.0) ** 2
    got = fm.norm(fm.renorm_exp(z, 30), m, 1.0, "sequence", ones())
    assert got == pytest.approx(math.sqrt(generating_function(ones(), "direct", r)), rel=1e-12)


def test_evaluate_and_batch_agree(rng):
    x = fm.random_expansion(rng, 3, 4)
    pts = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    batch = fm.evaluate_batch(x, pts)
    for p, v in zip(pts, batch):
        assert fm.evaluate(x, p) == pytest.approx(v, rel=1e-10)


def test_renormalised_exponential_evaluates_to_wick_exponential():
    z = np.array([0.4, -0.3])
    x = np.array([0.7, 1.1])
    got = fm.evaluate(fm.renorm_exp(z, 30), x)
    assert got == pytest.approx(math.exp(float(x @ z) - 0.5 * float(z @ z)), rel=1e-12)


def test_translation_and_scaling(rng):
    x = fm.random_expansion(rng, 2, 4)
    y = np.array([0.2, -0.5])
    p = np.array([1.0, 0.3])
    assert fm.evaluate(fm.translation(y, x), p) == pytest.approx(fm.evaluate(x, p + y), rel=1e-10)
    assert fm.evaluate(fm.scaling(0.5 + 0.5j, x), p) == pytest.approx(fm.evaluate(x, (0.5 + 0.5j) * p), rel=1e-10)


def test_gauss_transform_at_one_one_is_s_transform(rng):
    x = fm.random_expansion(rng, 2, 4)
    p = np.array([0.4, -1.2])
    assert fm.evaluate(fm.fourier_gauss(1.0, 1.0, x), p) == pytest.approx(fm.s_transform(x, p), rel=1e-10)


def test_renormalizing_operator_on_exponentials():
    z = np.array([0.3 + 0.1j, -0.2])
    out = fm.renormalizing_operator(fm.plain_exp(z, 6))
    assert out.max_abs_diff(fm.renorm_exp(z, 6)) < 1e-12


def test_norm_kinds_and_sandwich(rng):
    m = fm.SpaceModel(4)
    g = beta_exp(0.5)
    x = fm.random_expansion(rng, 4, 5)
    q = 1.0 + m.sandwich_gap()
    assert fm.norm(x, m, -1.0, "generalized_dual", g) <= fm.norm(x, m, -1.0, "generalized", g) * (1 + 1e-12)
    assert fm.norm(x, m, 1.0, "test_dual", g) <= math.e * fm.norm(x, m, q, "test", g) * (1 + 1e-12)
    with pytest.raises(ValueError):
        fm.norm(x, m, 1.0, "mystery", g)


def test_json_round_trip(rng):
    x = fm.random_expansion(rng, 2, 3)
    y = fm.ChaosExpansion.from_json(x.to_json())
    assert x.max_abs_diff(y) == 0.0


def test_gaussian_integral_and_hida():
    m = fm.SpaceModel(2, (2.0, 4.0))
    assert fm.gaussian_exp_integral(m, 1.0, 0.1) == pytest.approx((1 - 0.1) ** -0.5 * (1 - 0.4 / 16) ** -0.5)
    m4 = fm.SpaceModel(4)
    res = fm.hida_check(m4, fm.standard_gaussian(4), 1.0, pure_exp(), 4.0)
    assert res.integrable and res.norm_constant is not None and math.isfinite(res.norm_constant)
    assert not fm.hida_check(m4, fm.standard_gaussian(4), 0.0, pure_exp()).integrable


def test_intrinsic_estimate_is_a_lower_bound_on_exponentials(rng):
    m = fm.SpaceModel(2)
    z = np.array([0.3, 0.2])
    x = fm.renorm_exp(z, 30)
    est = fm.intrinsic_norm_estimate(x, m, 0.0, pure_exp(), rng, starts=32, steps=60, polish=2)
    exact = 0.5 * float(np.sum(np.abs(z) ** 2)) - 0.5 * float(np.sum(z * z))
    assert est.log_lower_bound <= exact + 1e-9
    assert est.log_lower_bound == pytest.approx(exact, abs=1e-5)
