"""Closed-form throughput expressions, guard-zone constants, and capacity regimes.

These serve as oracles for the slot simulator: the guard zone converts the SIR
threshold into a distance criterion, F(alpha) is the Rayleigh fade-ratio
correction, and the bracket expressions for total/transport throughput predict
how the simulator's averages move with (n, p_t, r, W_B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

# Asymptotic root of the transport-radius stationarity condition (valid n >= 100).
TRANSPORT_ROOT_COEFF = 1.256


def guard_zone(sir0: float, alpha: float) -> tuple[float, float]:
    """Guard zone Delta = SIR0**(1/alpha) - 1 and area constant c1 = pi*(1+Delta)**2."""
    if not sir0 > 1.0:
        raise ValueError(f"SIR0 must exceed 1, got {sir0}")
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    delta = sir0 ** (1.0 / alpha) - 1.0
    return delta, math.pi * (1.0 + delta) ** 2


def f_alpha(alpha: float) -> float:
    """Rayleigh fade-ratio moment E[(F1/F2)**(2/alpha)] = (2pi/alpha)/sin(2pi/alpha).

    Diverges for alpha <= 2 (returns math.inf)."""
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if alpha <= 2.0:
        return math.inf
    x = 2.0 * math.pi / alpha
    return x / math.sin(x)


def f_alpha_monte_carlo(alpha: float, samples: int = 10**6, seed: int = 0) -> float:
    """Sampling oracle for f_alpha: mean of (F1/F2)**(2/alpha) over Exp(1) pairs."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0xFA]))
    f1 = rng.standard_exponential(samples)
    f2 = rng.standard_exponential(samples)
    return float(np.mean((f1 / f2) ** (2.0 / alpha)))


@dataclass(frozen=True)
class RatioCheckReport:
    ks_stat: float
    p_value: float
    median: float
    passed: bool


def ratio_distribution_check(samples: int = 10**6, seed: int = 0) -> RatioCheckReport:
    """KS test (1% level) that V = F1/F2 for Exp(1) pairs has CDF v/(1+v)."""
    if samples < 10**5:
        raise ValueError(f"need at least 1e5 samples, got {samples}")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0xFB]))
    v = rng.standard_exponential(samples) / rng.standard_exponential(samples)
    res = stats.kstest(v, lambda t: t / (1.0 + t))
    return RatioCheckReport(
        ks_stat=float(res.statistic),
        p_value=float(res.pvalue),
        median=float(np.median(v)),
        passed=bool(res.pvalue >= 0.01),
    )


def _bracket_power(n: int, x: float) -> float:
    """1 - (1 - x)**(n-1), computed stably for tiny x."""
    return -math.expm1((n - 1) * math.log1p(-x))


def analytic_total_throughput(n: int, p_t: float, r: float, w_b: float, c1: float) -> float:
    """Expected total throughput bracket n(1-p_t)[1-(1-c1 p_t r^2 W_B)^(n-1)]
    / [c1 (n-1) r^2 W_B] (order constant dropped)."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 < w_b <= 1.0:
        raise ValueError(f"W_B must lie in (0, 1], got {w_b}")
    x = c1 * p_t * r * r * w_b
    if x >= 1.0:
        raise ValueError(f"c1*p_t*r^2*W_B = {x:.4g} must stay below 1")
    return n * (1.0 - p_t) * _bracket_power(n, x) / (c1 * (n - 1) * r * r * w_b)


def transport_bounds(
    n: int, p_t: float, r: float, w_b: float, c1: float
) -> tuple[float, float]:
    """Lower/upper brackets for expected total transport throughput.

    Upper bound is r times the total-throughput bracket; lower bound is
    2 n p_t (1-p_t) r (1 - c1 p_t r^2 W_B)^(n-2) / 3."""
    x = c1 * p_t * r * r * w_b
    if x >= 1.0:
        raise ValueError(f"c1*p_t*r^2*W_B = {x:.4g} must stay below 1")
    lower = 2.0 * n * p_t * (1.0 - p_t) * r * (1.0 - x) ** (n - 2) / 3.0
    upper = r * analytic_total_throughput(n, p_t, r, w_b, c1)
    return lower, upper


def transport_root(n: int) -> float:
    """Bisection root w in (0,1) of 2(n-1) w (1-w)^(n-2) = 1 - (1-w)^(n-1).

    This is the stationarity condition of the transport-throughput bracket in r,
    with w = c1 W_B r^2 / 2; the root behaves as 1.256/n for large n."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")

    def g(w: float) -> float:
        return 2.0 * (n - 1) * w * (1.0 - w) ** (n - 2) - _bracket_power(n, w)

    return float(optimize.bisect(g, 1e-12, 1.0 - 1e-12, xtol=1e-15, maxiter=200))


def transport_root_value(n: int) -> float:
    """Asymptotic root 1.256/n for n >= 100, exact bisection below."""
    return TRANSPORT_ROOT_COEFF / n if n >= 100 else transport_root(n)


@dataclass(frozen=True)
class CapacityRegime:
    """Recommended (p_t, r) and the predicted throughput order for a given W_B."""

    objective: str  # "total" | "transport"
    regime: str  # order expression
    p_t: float
    r: float
    pt_clamped: bool  # transport large-W_B branch wanted p_t > 1/2
    r_clamped: bool  # optimal radius fell below the connectivity floor


def optimal_params(n: int, w_b: float, objective: str, c1: float) -> CapacityRegime:
    """Pick (p_t, r) maximizing the throughput bracket, with the regime label.

    Connectivity requires r >= sqrt(log(n)/n) (natural log, unit constant).
    The transmit probability is restricted to (0, 1/2]; when the transport
    branch asks for a larger p_t it is clamped and flagged.
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if not 0.0 < w_b <= 1.0:
        raise ValueError(f"W_B must lie in (0, 1], got {w_b}")
    if objective not in ("total", "transport"):
        raise ValueError(f"objective must be 'total' or 'transport', got {objective!r}")
    log_n = math.log(n)
    floor = math.sqrt(log_n / n)

    if objective == "total":
        regime = "Theta(n / (W_B log n))" if w_b >= 1.0 / log_n else "Theta(n)"
        return CapacityRegime(
            objective=objective, regime=regime, p_t=0.5, r=floor,
            pt_clamped=False, r_clamped=False,
        )

    if w_b >= 1.0 / log_n:
        want = 1.0 / (w_b * log_n)
        return CapacityRegime(
            objective=objective,
            regime="Theta(sqrt(n) / (W_B sqrt(log n)))",
            p_t=min(0.5, want),
            r=floor,
            pt_clamped=want > 0.5,
            r_clamped=False,
        )
    w = transport_root_value(n)
    r0 = math.sqrt(2.0 * w / (c1 * w_b))
    regime = "Theta(sqrt(n / W_B))" if w_b >= 1.0 / n else "Theta(n)"
    return CapacityRegime(
        objective=objective,
        regime=regime,
        p_t=0.5,
        r=max(r0, floor),
        pt_clamped=False,
        r_clamped=r0 < floor,
    )


@dataclass(frozen=True)
class OptimalityReport:
    all_strict: bool  # eta1 at p_t0 < eta1 at 1-p_t0 over the whole (1/2, 1) grid
    argmax_p_t: float  # grid argmax of eta1 over (0, 1)
    max_gap: float  # largest eta1(p_t0) - eta1(1-p_t0) observed (should be < 0)


def per_link_throughput_factor(p_t, n: int, w_b: float, c1: float, d: float):
    """eta1(p_t) = p_t (1-p_t) (1 - p_t c1 d^2 W_B)^(n-2), the per-link rate shape."""
    p = np.asarray(p_t, dtype=float)
    return p * (1.0 - p) * (1.0 - p * c1 * d * d * w_b) ** (n - 2)


def optimality_region_check(
    n: int, w_b: float, c1: float, d: float, grid: int = 10**4
) -> OptimalityReport:
    """Confirm the per-link throughput factor peaks at p_t <= 1/2."""
    if not 0.0 < c1 * d * d * w_b < 1.0:
        raise ValueError("need 0 < c1*d^2*W_B < 1 for a valid throughput factor")
    p_hi = np.linspace(0.5, 1.0, 200, endpoint=False)[1:]
    hi = per_link_throughput_factor(p_hi, n, w_b, c1, d)
    lo = per_link_throughput_factor(1.0 - p_hi, n, w_b, c1, d)
    gaps = hi - lo
    p = np.linspace(0.0, 1.0, grid, endpoint=False)[1:]
    argmax = float(p[np.argmax(per_link_throughput_factor(p, n, w_b, c1, d))])
    return OptimalityReport(
        all_strict=bool(np.all(gaps < 0.0)),
        argmax_p_t=argmax,
        max_gap=float(gaps.max()),
    )
