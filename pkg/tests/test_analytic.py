import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamnet import analytic
from beamnet.analytic import (
    analytic_total_throughput,
    f_alpha,
    f_alpha_monte_carlo,
    guard_zone,
    optimal_params,
    optimality_region_check,
    per_link_throughput_factor,
    ratio_distribution_check,
    transport_bounds,
    transport_root,
    transport_root_value,
)

C1_REF = guard_zone(10.0, 4.0)[1]


def test_guard_zone_reference_values():
    delta, c1 = guard_zone(10.0, 4.0)
    assert delta == pytest.approx(0.778, abs=5e-4)
    assert c1 == pytest.approx(9.935, abs=5e-4)


def test_guard_zone_closed_forms():
    delta, c1 = guard_zone(16.0, 4.0)
    assert delta == pytest.approx(1.0, abs=1e-12)
    assert c1 == pytest.approx(4 * math.pi, abs=1e-12)
    delta, c1 = guard_zone(10.0, 2.0)
    assert delta == pytest.approx(math.sqrt(10) - 1, abs=1e-12)
    assert c1 == pytest.approx(10 * math.pi, abs=1e-9)


def test_guard_zone_validation():
    with pytest.raises(ValueError):
        guard_zone(1.0, 4.0)
    with pytest.raises(ValueError):
        guard_zone(10.0, 0.5)


def test_f_alpha_reference_points():
    assert f_alpha(4.0) == math.pi / 2
    assert math.isinf(f_alpha(2.0))
    assert math.isinf(f_alpha(1.5))
    assert f_alpha(8.0) == pytest.approx((math.pi / 4) / math.sin(math.pi / 4), abs=1e-12)
    assert f_alpha(8.0) == pytest.approx(1.1107, abs=1e-4)


def test_f_alpha_decreasing_toward_one():
    alphas = np.linspace(2.1, 64.0, 200)
    vals = [f_alpha(a) for a in alphas]
    assert all(v > 1.0 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_f_alpha_monte_carlo_agrees():
    assert f_alpha_monte_carlo(4.0, 10**6, seed=1) == pytest.approx(math.pi / 2, rel=0.01)
    assert f_alpha_monte_carlo(8.0, 10**6, seed=2) == pytest.approx(f_alpha(8.0), rel=0.01)


def test_ratio_distribution_check():
    rep = ratio_distribution_check(2 * 10**5, seed=3)
    assert rep.passed
    assert rep.median == pytest.approx(1.0, abs=0.02)


def test_ratio_distribution_quantiles():
    rng = np.random.default_rng(5)
    v = rng.standard_exponential(10**6) / rng.standard_exponential(10**6)
    assert np.mean(v <= 1.0) == pytest.approx(0.5, abs=0.005)
    assert np.mean(v <= 3.0) == pytest.approx(0.75, abs=0.005)


def test_ratio_check_needs_samples():
    with pytest.raises(ValueError):
        ratio_distribution_check(10**4)


def test_total_throughput_zero_at_pt_zero():
    assert analytic_total_throughput(1000, 0.0, 0.05, 0.5, C1_REF) == 0.0


def test_total_throughput_small_wb_limit():
    n, p_t, r = 1000, 0.3, 0.05
    got = analytic_total_throughput(n, p_t, r, 1e-12, C1_REF)
    assert got == pytest.approx(n * p_t * (1 - p_t), rel=1e-6)


def test_total_throughput_rejects_saturated_argument():
    with pytest.raises(ValueError):
        analytic_total_throughput(1000, 0.5, 0.5, 1.0, C1_REF)


@given(st.floats(0.01, 0.99), st.floats(0.02, 0.1), st.integers(100, 5000))
@settings(max_examples=40, deadline=None)
def test_total_throughput_decreasing_in_wb(w_hi, r, n):
    w_lo = w_hi * 0.5
    hi = analytic_total_throughput(n, 0.3, r, w_lo, C1_REF)
    lo = analytic_total_throughput(n, 0.3, r, w_hi, C1_REF)
    assert hi >= lo


def test_transport_bounds_zero_at_pt_zero():
    assert transport_bounds(1000, 0.0, 0.05, 0.5, C1_REF) == (0.0, 0.0)


def test_transport_upper_is_r_times_total():
    n, p_t, r, w = 500, 0.3, 0.06, 0.4
    _, hi = transport_bounds(n, p_t, r, w, C1_REF)
    assert hi == r * analytic_total_throughput(n, p_t, r, w, C1_REF)


@given(st.floats(0.05, 0.5), st.floats(0.02, 0.09), st.floats(0.05, 1.0))
@settings(max_examples=40, deadline=None)
def test_transport_lower_below_upper(p_t, r, w):
    lo, hi = transport_bounds(800, p_t, r, w, C1_REF)
    assert lo <= hi


def test_transport_root_matches_asymptote():
    for n in (10**3, 10**4, 10**5):
        w = transport_root(n)
        assert w == pytest.approx(1.256 / n, rel=0.02)


def test_transport_root_value_switches():
    assert transport_root_value(10**4) == 1.256 / 10**4
    assert transport_root_value(50) == pytest.approx(transport_root(50), rel=1e-9)


def test_transport_root_is_a_root():
    n = 2000
    w = transport_root(n)
    lhs = 2 * (n - 1) * w * (1 - w) ** (n - 2)
    rhs = 1 - (1 - w) ** (n - 1)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_optimal_params_total_omni():
    reg = optimal_params(10**4, 1.0, "total", C1_REF)
    assert reg.p_t == 0.5
    assert reg.r == pytest.approx(math.sqrt(math.log(10**4) / 10**4), abs=1e-12)
    assert "W_B" in reg.regime and "log" in reg.regime


def test_optimal_params_tiny_wb_transport_is_linear_regime():
    reg = optimal_params(10**4, 1e-5, "transport", C1_REF)
    assert reg.regime == "Theta(n)"


def test_optimal_params_transport_radius_value():
    reg = optimal_params(10**4, 0.01, "transport", C1_REF)
    assert reg.p_t == 0.5
    assert reg.r == pytest.approx(0.05028, abs=5e-5)
    assert not reg.r_clamped


def test_optimal_transport_radius_maximizes_bracket():
    # oracle: direct grid maximization of the transport bracket in r
    n, w_b = 10**4, 0.01
    reg = optimal_params(n, w_b, "transport", C1_REF)
    r_grid = np.linspace(1e-4, 0.2, 10**4)
    f2 = (1 - (1 - C1_REF * 0.5 * r_grid**2 * w_b) ** (n - 1)) / (w_b * r_grid)
    r_star = r_grid[np.argmax(f2)]
    assert abs(reg.r - r_star) <= 2 * (r_grid[1] - r_grid[0])
    assert reg.r == pytest.approx(r_star, rel=0.01)


def test_optimal_params_pt_clamp_flag():
    # W_B log n < 2 makes the large-W_B transport branch ask for p_t > 1/2
    reg = optimal_params(10**4, 0.15, "transport", C1_REF)
    assert reg.p_t == 0.5
    assert reg.pt_clamped


def test_regime_label_consistency():
    for n in (10**3, 10**4):
        thresh = 1.0 / math.log(n)
        assert optimal_params(n, thresh * 0.999, "total", C1_REF).regime == "Theta(n)"
        assert optimal_params(n, thresh * 1.001, "total", C1_REF).regime != "Theta(n)"


def test_optimal_params_validation():
    with pytest.raises(ValueError):
        optimal_params(2, 0.5, "total", C1_REF)
    with pytest.raises(ValueError):
        optimal_params(100, 0.0, "total", C1_REF)
    with pytest.raises(ValueError):
        optimal_params(100, 0.5, "both", C1_REF)


def test_optimality_region():
    rep = optimality_region_check(1000, 0.3, C1_REF, 0.05)
    assert rep.all_strict
    assert rep.argmax_p_t <= 0.5
    assert rep.max_gap < 0.0


def test_optimality_gap_vanishes_at_half():
    n, w_b, d = 1000, 0.3, 0.05
    eps = 1e-6
    hi = per_link_throughput_factor(0.5 + eps, n, w_b, C1_REF, d)
    lo = per_link_throughput_factor(0.5 - eps, n, w_b, C1_REF, d)
    assert hi == pytest.approx(lo, rel=1e-3)


def test_throughput_factor_ordering_example():
    n, w_b, d = 1000, 0.3, 0.05
    assert per_link_throughput_factor(0.9, n, w_b, C1_REF, d) < per_link_throughput_factor(
        0.1, n, w_b, C1_REF, d
    )


def test_optimality_region_validation():
    with pytest.raises(ValueError):
        optimality_region_check(1000, 1.0, C1_REF, 0.5)
