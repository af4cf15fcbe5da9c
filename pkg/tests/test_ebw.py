import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from beamnet.ebw import (
    BasisDistribution,
    MixtureDistribution,
    ebw_monotonicity_scan,
    effective_beam_width,
    interference_probability,
    mixture_ebw,
    quadrature_beam_width,
    verify_bounds,
)
from beamnet.patterns import binomial_array, chebyshev_array, esnla, omni, sector

SAMPLES = 2 * 10**5


def combined_se(*ests):
    return math.sqrt(sum(e.stderr**2 for e in ests))


def test_basis_distribution_validation():
    with pytest.raises(ValueError):
        BasisDistribution(0.0)
    with pytest.raises(ValueError):
        BasisDistribution(-1.0)


def test_basis_cdf_endpoints():
    d = BasisDistribution(2.5)
    assert d.cdf(0.0) == 0.0
    assert d.cdf(1.0) == 1.0
    assert d.cdf(0.5) == pytest.approx(0.5**2.5)


@given(st.floats(0.2, 8.0))
@settings(max_examples=25, deadline=None)
def test_basis_samples_in_unit_interval(h):
    x = BasisDistribution(h).sample(np.random.default_rng(0), 2000)
    assert np.all((x >= 0.0) & (x <= 1.0))


def test_h3_matches_radial_ball_law():
    # the h = 3 basis is the 3-D radial law p(x) = 3x^2, so X^3 is uniform
    x = BasisDistribution(3.0).sample(np.random.default_rng(42), 10**5)
    assert stats.kstest(x**3, "uniform").pvalue >= 0.01


@pytest.mark.parametrize(
    "weights,orders",
    [((), ()), ((0.5, 0.6), (1.0, 2.0)), ((-0.1, 1.1), (1.0, 2.0)), ((0.5, 0.5), (1.0, -2.0))],
)
def test_mixture_validation(weights, orders):
    with pytest.raises(ValueError):
        MixtureDistribution(weights, orders)


def test_mixture_cdf_is_weighted_sum():
    m = MixtureDistribution((0.25, 0.75), (1.0, 3.0))
    x = np.linspace(0, 1, 11)
    assert np.allclose(m.cdf(x), 0.25 * x + 0.75 * x**3)


def test_omni_beam_width_is_one():
    est = effective_beam_width(omni(), BasisDistribution(2.0), 4.0, 10**4, seed=0)
    assert est.value == 1.0
    assert est.stderr == 0.0


def test_sector_beam_width_matches_fraction():
    est = effective_beam_width(sector(0.25), BasisDistribution(2.0), 4.0, SAMPLES, seed=1)
    assert abs(est.value - 0.25) <= 3 * est.stderr


def test_estimator_matches_quadrature_oracle():
    p = esnla(4, 0.5)
    est = effective_beam_width(p, BasisDistribution(2.0), 4.0, 10**6, seed=2)
    q = quadrature_beam_width(p, BasisDistribution(2.0), 4.0)
    assert abs(est.value - q.value) <= 3 * est.stderr


@pytest.mark.parametrize(
    "p",
    [sector(0.3), esnla(2, 0.5), esnla(4, 0.5), binomial_array(4, 0.5), chebyshev_array(4, 0.5, 30.0)],
    ids=lambda p: p.label,
)
@pytest.mark.parametrize("h", [1.0, 2.0, 4.0])
def test_quadrature_agreement_fixture_set(p, h):
    est = effective_beam_width(p, BasisDistribution(h), 4.0, SAMPLES, seed=3)
    q = quadrature_beam_width(p, BasisDistribution(h), 4.0, x_points=1 << 12, phi_grid=1 << 18)
    assert abs(est.value - q.value) <= 3 * max(est.stderr, 1e-4)


def test_interference_omni_pair_is_one():
    est = interference_probability(omni(), omni(), BasisDistribution(2.0), 4.0, 10**4, seed=0)
    assert est.value == 1.0


def test_interference_sector_pair_is_product():
    est = interference_probability(
        sector(0.5), sector(0.25), BasisDistribution(2.0), 4.0, SAMPLES, seed=4
    )
    assert abs(est.value - 0.125) <= 3 * est.stderr


def test_product_form_single_order():
    p = esnla(4, 0.5)
    pr = interference_probability(p, p, BasisDistribution(2.0), 4.0, 10**6, seed=5)
    w = effective_beam_width(p, BasisDistribution(2.0), 4.0, 10**6, seed=6)
    prod_se = math.sqrt(2) * w.value * w.stderr
    assert abs(pr.value - w.value**2) <= 3 * math.sqrt(pr.stderr**2 + prod_se**2)


def test_mixture_single_component_reduces_to_basis():
    p = esnla(4, 0.5)
    m = mixture_ebw(p, MixtureDistribution((1.0,), (2.0,)), 4.0, SAMPLES, seed=7)
    b = effective_beam_width(p, BasisDistribution(2.0), 4.0, SAMPLES, seed=8)
    assert abs(m.value - b.value) <= 3 * combined_se(m, b)


def test_mixture_on_sector_is_order_free():
    m = mixture_ebw(
        sector(0.25), MixtureDistribution((0.5, 0.5), (1.0, 3.0)), 4.0, SAMPLES, seed=9
    )
    assert abs(m.value - 0.25) <= 3 * m.stderr


def test_mixture_matches_component_quadratures():
    p = esnla(4, 0.5)
    mix = MixtureDistribution((0.5, 0.5), (1.0, 4.0))
    est = mixture_ebw(p, mix, 4.0, 10**6, seed=10)
    want = 0.5 * quadrature_beam_width(p, BasisDistribution(1.0), 4.0).value
    want += 0.5 * quadrature_beam_width(p, BasisDistribution(4.0), 4.0).value
    assert abs(est.value - want) <= 3 * est.stderr


def test_mixture_requires_mixture_type():
    with pytest.raises(ValueError):
        mixture_ebw(omni(), BasisDistribution(2.0), 4.0, 100, seed=0)


def test_bounds_single_order_equality():
    p = esnla(4, 0.5)
    rep = verify_bounds(p, p, MixtureDistribution((1.0,), (2.0,)), 4.0, SAMPLES, seed=11)
    assert rep.passed
    gap = abs(rep.pr_ei - rep.product_lower)
    assert gap <= 3 * math.sqrt(rep.pr_ei_stderr**2 + rep.product_stderr**2)


def test_bounds_sector_equality_any_mixture():
    mix = MixtureDistribution((0.3, 0.7), (1.0, 4.0))
    rep = verify_bounds(sector(0.4), sector(0.25), mix, 4.0, SAMPLES, seed=12)
    assert rep.passed
    gap = abs(rep.pr_ei - rep.product_lower)
    assert gap <= 3 * math.sqrt(rep.pr_ei_stderr**2 + rep.product_stderr**2)


def test_bounds_strict_excess_for_mixed_orders():
    p = esnla(4, 0.5)
    mix = MixtureDistribution((0.5, 0.5), (1.0, 4.0))
    rep = verify_bounds(p, p, mix, 4.0, 10**6, seed=13)
    assert rep.passed
    excess = rep.pr_ei - rep.product_lower
    assert excess > 3 * math.sqrt(rep.pr_ei_stderr**2 + rep.product_stderr**2)
    assert rep.pr_ei <= rep.min_upper + 3 * math.sqrt(rep.pr_ei_stderr**2 + rep.min_stderr**2)


def test_monotone_in_alpha_star():
    rows = ebw_monotonicity_scan(
        esnla(4, 0.5), alpha_star_list=[0.5, 1.0, 2.0, 4.0], samples=SAMPLES, seed=14
    )
    for (_, a), (_, b) in zip(rows, rows[1:]):
        assert b.value >= a.value - 3 * combined_se(a, b)


def test_monotone_decreasing_in_h():
    rows = ebw_monotonicity_scan(
        esnla(4, 0.5), h_list=[1.0, 2.0, 4.0, 8.0], alpha=4.0, samples=SAMPLES, seed=15
    )
    for (_, a), (_, b) in zip(rows, rows[1:]):
        assert b.value <= a.value + 3 * combined_se(a, b)


def test_scan_omni_constant():
    rows = ebw_monotonicity_scan(omni(), alpha_star_list=[0.5, 1.0, 2.0], samples=10**4, seed=0)
    assert all(est.value == 1.0 for _, est in rows)


def test_scan_validation():
    with pytest.raises(ValueError):
        ebw_monotonicity_scan(omni())
    with pytest.raises(ValueError):
        ebw_monotonicity_scan(omni(), alpha_star_list=[1.0], h_list=[1.0])
    with pytest.raises(ValueError):
        ebw_monotonicity_scan(omni(), alpha_star_list=[2.0, 1.0])


def test_fixed_seed_reproducible():
    p = esnla(4, 0.5)
    a = effective_beam_width(p, BasisDistribution(2.0), 4.0, SAMPLES, seed=16)
    b = effective_beam_width(p, BasisDistribution(2.0), 4.0, SAMPLES, seed=16)
    assert a.value == b.value


def test_thread_count_does_not_change_result():
    p = esnla(4, 0.5)
    args = (p, BasisDistribution(2.0), 4.0, 3 * 10**6)
    a = effective_beam_width(*args, seed=17, threads=1)
    b = effective_beam_width(*args, seed=17, threads=4)
    assert a.value == b.value


def test_stderr_shrinks_with_samples():
    p = esnla(4, 0.5)
    a = effective_beam_width(p, BasisDistribution(2.0), 4.0, SAMPLES, seed=18)
    b = effective_beam_width(p, BasisDistribution(2.0), 4.0, 2 * SAMPLES, seed=18)
    assert b.stderr < a.stderr
    assert b.stderr / a.stderr == pytest.approx(1 / math.sqrt(2), rel=0.1)


def test_estimator_validation():
    with pytest.raises(ValueError):
        effective_beam_width(omni(), BasisDistribution(2.0), 0.5, 100)
    with pytest.raises(ValueError):
        effective_beam_width(omni(), BasisDistribution(2.0), 4.0, 0)
