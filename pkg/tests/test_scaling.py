import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamnet import scaling
from beamnet.ebw import BasisDistribution, effective_beam_width
from beamnet.patterns import chebyshev_array
from beamnet.scaling import (
    PowerLawFit,
    SweepRow,
    SweepTable,
    family_ordering_check,
    fit_power_law,
    optimize_chebyshev_rms,
    parallel_lines_check,
    spacing_check,
    sweep,
)

SAMPLES = 2 * 10**5


def synthetic_table(b1, gamma, n_list=(2, 4, 8, 16), **kw):
    rows = tuple(SweepRow(n=n, w_b=b1 / n**gamma, stderr=0.0) for n in n_list)
    return SweepTable(family=kw.get("family", "esnla"), alpha_star=kw.get("alpha_star", 2.0),
                      d_ratio=kw.get("d_ratio", 0.5), rows=rows)


def test_fit_recovers_exact_power_law():
    fit = fit_power_law(synthetic_table(0.659, 0.810))
    assert fit.b1 == pytest.approx(0.659, abs=1e-12)
    assert fit.gamma == pytest.approx(0.810, abs=1e-12)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)


@given(st.floats(0.05, 1.0), st.floats(0.05, 2.0))
@settings(max_examples=40, deadline=None)
def test_fit_exact_on_random_power_laws(b1, gamma):
    fit = fit_power_law(synthetic_table(b1, gamma))
    assert fit.b1 == pytest.approx(b1, rel=1e-9)
    assert fit.gamma == pytest.approx(gamma, abs=1e-9)


def test_fit_validation():
    with pytest.raises(ValueError):
        fit_power_law(synthetic_table(0.5, 0.5, n_list=(2, 4)))
    rows = (SweepRow(2, 0.5, 0.0), SweepRow(4, 0.4, 0.0), SweepRow(8, 0.3, 0.0))
    table = SweepTable("esnla", 2.0, 0.5, rows)
    fit_power_law(table)  # fine
    with pytest.raises(ValueError):
        SweepTable("esnla", 2.0, 0.5, rows + (SweepRow(16, 1.5, 0.0),))


def test_sweep_table_needs_increasing_n():
    with pytest.raises(ValueError):
        SweepTable("esnla", 2.0, 0.5, (SweepRow(4, 0.5, 0.0), SweepRow(2, 0.6, 0.0)))


def test_fit_prediction_interpolates():
    t = synthetic_table(0.7, 0.6)
    fit = fit_power_law(t)
    for row in t.rows:
        assert fit.predict(row.n) == pytest.approx(row.w_b, rel=1e-9)


def test_omni_sweep_is_constant_one():
    t = sweep("omni", [2, 4, 6], alpha_star=2.0, samples=10**4, seed=0)
    assert all(r.w_b == 1.0 for r in t.rows)


def test_esnla_sweep_decreases():
    t = sweep("esnla", [2, 4, 6], alpha_star=2.0, samples=SAMPLES, seed=1)
    vals = [r.w_b for r in t.rows]
    assert vals[0] > vals[1] > vals[2]


@pytest.mark.parametrize("family", ["esnla", "binomial"])
def test_fit_describes_sweep(family):
    # positive decay index and a tight log-log fit; pointwise residuals carry
    # a systematic few-percent curvature term, so they are bounded relatively
    t = sweep(family, [2, 4, 6, 8, 10, 12], alpha_star=2.0, samples=SAMPLES, seed=5)
    fit = fit_power_law(t)
    assert fit.gamma > 0
    assert fit.r2 >= 0.98
    for row in t.rows:
        assert abs(fit.predict(row.n) - row.w_b) / row.w_b <= 0.10


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep("vivaldi", [2, 4])
    with pytest.raises(ValueError):
        sweep("esnla", [2, 3, 4], samples=100)
    with pytest.raises(ValueError):
        sweep("esnla", [2, 4], alpha_star=-1.0, samples=100)


def test_chebyshev_sweep_records_rms():
    t = sweep("chebyshev", [2, 4], alpha_star=2.0, samples=5 * 10**4, seed=2)
    assert all(r.r_ms is not None and r.r_ms > 1.0 for r in t.rows)
    assert all(0.0 < r.w_b <= 1.0 for r in t.rows)


def test_optimizer_beats_grid_neighbors():
    n, a_star, samples, seed = 4, 2.0, SAMPLES, 3
    r_best, w_best = optimize_chebyshev_rms(n, a_star, 0.5, samples, seed)
    grid = np.logspace(math.log10(scaling.RMS_GRID_LO), math.log10(scaling.RMS_GRID_HI),
                       scaling.RMS_GRID_POINTS)
    i = int(np.argmin(np.abs(np.log10(grid) - math.log10(r_best))))
    for j in (max(i - 1, 0), min(i + 1, len(grid) - 1)):
        est = effective_beam_width(
            chebyshev_array(n, 0.5, grid[j]), BasisDistribution(2.0), 2 * a_star, samples, seed
        )
        assert w_best <= est.value + 1e-12


def test_optimizer_beats_huge_rms():
    r_best, w_best = optimize_chebyshev_rms(4, 2.0, 0.5, SAMPLES, seed=4)
    est = effective_beam_width(
        chebyshev_array(4, 0.5, 1e6), BasisDistribution(2.0), 4.0, SAMPLES, seed=4
    )
    assert est.value >= w_best


def test_parallel_lines_single_table():
    rep = parallel_lines_check([synthetic_table(0.6, 0.8)])
    assert rep.gamma_spread == 0.0
    assert rep.intercepts_increasing


def test_parallel_lines_orders_by_alpha_star():
    tables = [
        synthetic_table(0.4, 0.75, alpha_star=0.5),
        synthetic_table(0.6, 0.80, alpha_star=2.0),
        synthetic_table(0.5, 0.78, alpha_star=1.0),
    ]
    rep = parallel_lines_check(tables)
    assert rep.keys == (0.5, 1.0, 2.0)
    assert rep.gamma_spread == pytest.approx(0.05, abs=1e-9)
    assert rep.intercepts_increasing


def test_bundle_rejects_mismatched_tables():
    with pytest.raises(ValueError):
        parallel_lines_check([
            synthetic_table(0.5, 0.5),
            synthetic_table(0.5, 0.5, n_list=(2, 4, 8)),
        ])
    with pytest.raises(ValueError):
        parallel_lines_check([])


def test_spacing_check_zero_spread_on_identical():
    tables = [synthetic_table(0.5, 0.7, d_ratio=d) for d in (0.125, 0.25, 0.5)]
    rep = spacing_check(tables)
    assert rep.gamma_spread == pytest.approx(0.0, abs=1e-12)
    assert rep.keys == (0.125, 0.25, 0.5)


def test_spacing_check_reports_intercept_direction():
    tables = [
        synthetic_table(0.9, 0.7, d_ratio=0.125),
        synthetic_table(0.7, 0.7, d_ratio=0.25),
        synthetic_table(0.5, 0.7, d_ratio=0.5),
    ]
    assert not spacing_check(tables).intercepts_increasing


def test_family_ordering_check():
    bino = synthetic_table(0.6, 0.4, family="binomial")
    esn = synthetic_table(0.55, 0.81, family="esnla")
    cheb = synthetic_table(0.52, 0.81, family="chebyshev")
    assert all(family_ordering_check(bino, esn, cheb))
    # a chebyshev table sitting above esnla beyond the noise allowance flips the check
    high_cheb = synthetic_table(0.58, 0.81, family="chebyshev")
    assert not all(family_ordering_check(bino, esn, high_cheb))
    with pytest.raises(ValueError):
        family_ordering_check(bino, esn, synthetic_table(0.6, 0.8, n_list=(2, 4, 8)))
