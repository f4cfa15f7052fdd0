"""Principle predicates and the positivity, support and extinction estimators."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plap import closed_forms as cf
from plap import elliptic as el
from plap.errors import IncompatibleFieldsError
from plap.grid import INTERVAL, Field, ProblemSpec, SpaceTimeField, TimeMesh, build_grid, stack, zeros
from plap.parabolic import residual_field, solve_parabolic
from plap.principles import (
    HOLDS,
    INCONCLUSIVE,
    VIOLATED,
    check_hopf,
    check_scp,
    check_smp,
    check_strict_dichotomy,
    check_wcp,
    check_wmp,
    default_tol,
    extinction_time_estimate,
    extinction_time_fit,
    normal_derivatives,
    positivity_time,
    support_radius,
)


def _grid(n=65, a=-1.0, b=1.0):
    return build_grid(INTERVAL, n, a=a, b=b)


def _unit_source(x, t):
    return np.ones_like(x)


@pytest.fixture(scope="module")
def barenblatt_run():
    g = _grid(601, -6.0, 6.0)
    P = cf.BarenblattParams()
    spec = ProblemSpec(3.0, 0.0, g, Field(g, cf.barenblatt(g.nodes, 0.0, P)), eps_reg=0.0)
    return solve_parabolic(spec, TimeMesh(1.0, 200)), P


@pytest.fixture(scope="module")
def fast_source_run():
    g = _grid(257)
    spec = ProblemSpec(1.5, 0.0, g, zeros(g), source=_unit_source)
    return solve_parabolic(spec, TimeMesh(1.0, 200))


@pytest.fixture(scope="module")
def extinction_run():
    P = cf.ExtinctionParams.build(1.5, 0.5, 513)
    g = P.profile.grid
    spec = ProblemSpec(1.5, 0.0, g, Field(g, cf.extinction_solution(g.nodes, 0.0, P)), eps_reg=1e-12)
    return solve_parabolic(spec, TimeMesh(1.2, 1200)), P


def test_default_tolerance():
    assert default_tol(_grid(11)) == pytest.approx(0.04)
    assert default_tol(_grid(100001)) == pytest.approx(1e-9)


# ---------------------------------------------------------------- WMP


def test_wmp_zero_solution():
    g = _grid(9)
    r = check_wmp(stack(g, TimeMesh(1.0, 3), lambda x, t: 0 * x))
    assert r.verdict == HOLDS and r.margin == 0


def test_wmp_barenblatt(barenblatt_run):
    assert check_wmp(barenblatt_run[0]).holds


def test_wmp_fails_for_negative_logistic_branch():
    g = _grid(513)
    p = 1.5
    lam = 2 * el.lambda1_shooting(p, 2.0)
    w = el.solve_logistic(g, p, lam)
    tm = TimeMesh(1.0, 50)
    minus = stack(g, tm, lambda x, t: -w.values * cf.cauchy_solution(t, p))
    res = residual_field(minus, ProblemSpec(p, lam, g, zeros(g)))
    assert np.abs(res.values).max() < 1e-3
    r = check_wmp(minus)
    assert r.verdict == VIOLATED and r.margin < -r.tolerance
    assert r.witness[0] > 0


# ---------------------------------------------------------------- WCP


def test_wcp_identity(fast_source_run):
    r = check_wcp(fast_source_run, fast_source_run)
    assert r.holds and r.margin == 0


def test_wcp_slow_diffusion_ordered_sources():
    g = _grid(129)
    tm = TimeMesh(0.5, 50)
    u = solve_parabolic(ProblemSpec(3.0, 0.0, g, zeros(g)), tm)
    v = solve_parabolic(ProblemSpec(3.0, 0.0, g, zeros(g), source=_unit_source), tm)
    assert check_wcp(u, v).holds


def test_wcp_fails_for_saddle_pair():
    g = _grid(2049)
    p, lam = 1.5, 1.0
    c = el.build_saddle_construction(g, p, lam)
    w1 = el.minimize_energy(c.energy_spec, g, zeros(g))
    tm = TimeMesh(1.0, 20)
    u0 = stack(g, tm, lambda x, t: c.w0.values * cf.cauchy_solution(t, p))
    u1 = stack(g, tm, lambda x, t: w1.values * cf.cauchy_solution(t, p))
    verdicts = {check_wcp(u0, u1).verdict, check_wcp(u1, u0).verdict}
    assert VIOLATED in verdicts


def test_mesh_mismatch():
    a = stack(_grid(9), TimeMesh(1.0, 3), lambda x, t: 0 * x)
    b = stack(_grid(9), TimeMesh(1.0, 4), lambda x, t: 0 * x)
    for fn in (check_wcp, check_scp, check_strict_dichotomy):
        with pytest.raises(IncompatibleFieldsError):
            fn(a, b)


# ---------------------------------------------------------------- positivity times


def test_positivity_time_full():
    u = stack(_grid(9), TimeMesh(2.0, 4), lambda x, t: 1 + 0 * x)
    assert positivity_time(u) == (2.0, 2.0)


def test_positivity_time_extinction(extinction_run):
    u, P = extinction_run
    dt = u.dt
    t_bar, t_star = positivity_time(u, 1e-10)
    assert t_bar <= t_star <= t_bar + dt * (1 + 1e-9)
    # backward Euler trails the exact collapse by about (dt/2) ln(1/dt)
    lag = 0.5 * dt * math.log(1 / dt)
    assert 0 <= t_bar - cf.extinction_time(P) <= 2 * dt + lag


def test_positivity_time_barenblatt(barenblatt_run):
    u, _ = barenblatt_run
    t_bar, t_star = positivity_time(u, 1e-10)
    assert t_bar == 0.0 and t_star == pytest.approx(1.0)


@settings(max_examples=60)
@given(st.integers(0, 2**31), st.floats(-0.5, 0.5))
def test_t_bar_never_exceeds_t_star(seed, shift):
    rng = np.random.default_rng(seed)
    g = _grid(9)
    u = SpaceTimeField(g, TimeMesh(1.0, 6), rng.normal(size=(7, 9)) + shift)
    t_bar, t_star = positivity_time(u)
    assert t_bar <= t_star


# ---------------------------------------------------------------- Hopf


def test_hopf_fast_diffusion_at_half(fast_source_run):
    k = int(round(0.5 / fast_source_run.dt))
    r = check_hopf(fast_source_run, k)
    assert r.verdict == HOLDS and r.margin > r.tolerance


def test_hopf_linear_case():
    g = _grid(129)
    u = solve_parabolic(ProblemSpec(2.0, 0.0, g, zeros(g), source=_unit_source), TimeMesh(0.5, 50))
    assert check_hopf(u, -1).holds


def test_hopf_barenblatt_flat_boundary(barenblatt_run):
    r = check_hopf(barenblatt_run[0], -1)
    assert r.verdict == INCONCLUSIVE
    assert r.details["max_abs_normal_derivative"] < r.tolerance


def test_hopf_every_slice_before_t_bar(fast_source_run):
    u = fast_source_run
    assert check_wmp(u).holds
    kb = int(round(positivity_time(u)[0] / u.dt))
    assert kb > 0
    for k in range(1, kb + 1, 10):
        assert check_hopf(u, k).holds


def test_normal_derivative_stencil_exact_for_quadratics():
    g = _grid(21)
    d = normal_derivatives(1 - g.nodes**2, g)
    np.testing.assert_allclose(d, [-2.0, -2.0], rtol=1e-12)


# ---------------------------------------------------------------- SCP, SMP, dichotomy


def test_scp_fast_diffusion_pair(fast_source_run):
    v = fast_source_run
    u = stack(v.grid, v.tmesh, lambda x, t: 0 * x)
    r = check_scp(u, v)
    assert r.holds
    assert r.details["interior_margin"] > r.tolerance and r.details["flux_margin"] > r.tolerance
    assert check_wcp(u, v).holds


def test_scp_identity_violated(fast_source_run):
    r = check_scp(fast_source_run, fast_source_run)
    assert r.verdict == VIOLATED and r.margin == 0


def test_scp_slow_diffusion_free_boundary(barenblatt_run):
    v, _ = barenblatt_run
    u = stack(v.grid, v.tmesh, lambda x, t: 0 * x)
    assert check_scp(u, v).verdict in (INCONCLUSIVE, VIOLATED)


@settings(max_examples=60)
@given(st.integers(0, 2**31))
def test_strict_comparison_implies_weak(seed):
    rng = np.random.default_rng(seed)
    g = _grid(9)
    tm = TimeMesh(1.0, 4)
    b = np.abs(rng.normal(size=(5, 9))) + 0.01
    a = b - rng.uniform(-0.2, 1.0, size=(5, 9))
    b[:, [0, -1]] = a[:, [0, -1]] = 0.0
    u, v = SpaceTimeField(g, tm, a), SpaceTimeField(g, tm, b)
    # v stays positive, so the strict check covers every slice
    assert positivity_time(v, 1e-3)[0] == tm.T
    if check_scp(u, v, tol=1e-3, burn_in=0).holds:
        assert check_wcp(u, v, tol=1e-3).holds


@given(st.integers(0, 2**31))
def test_wcp_self_margin_zero(seed):
    rng = np.random.default_rng(seed)
    u = SpaceTimeField(_grid(9), TimeMesh(1.0, 3), rng.normal(size=(4, 9)))
    r = check_wcp(u, u)
    assert r.holds and r.margin == 0


def test_smp_and_dichotomy():
    g = _grid(9)
    tm = TimeMesh(1.0, 3)
    zero = stack(g, tm, lambda x, t: 0 * x)
    bump = stack(g, tm, lambda x, t: t * (1 - x**2))
    front = stack(g, tm, lambda x, t: t * np.maximum(0.5 - np.abs(x), 0))
    assert check_smp(zero).holds and check_smp(zero).details["identical_zero"]
    assert check_smp(bump).holds
    assert check_smp(front).verdict == VIOLATED
    assert check_strict_dichotomy(zero, zero).holds
    assert check_strict_dichotomy(zero, bump).holds
    assert check_strict_dichotomy(zero, front).verdict == VIOLATED


# ---------------------------------------------------------------- support and extinction


def test_support_radius_values():
    g = _grid(1201, -6.0, 6.0)
    assert support_radius(zeros(g)) == 0.0
    exact = Field(g, cf.barenblatt(g.nodes, 0.0))
    assert support_radius(exact, 0.0) == pytest.approx(3.3019272488946267, abs=g.h)


def test_support_tracks_closed_form(barenblatt_run):
    u, P = barenblatt_run
    rad = np.array([support_radius(u.slice(k), 1e-10) for k in range(u.tmesh.mT + 1)])
    assert np.all(np.diff(rad) >= 0)
    assert np.max(np.abs(rad - cf.barenblatt_support_radius(u.times, P))) <= 2 * u.grid.h


def test_extinction_estimates(extinction_run):
    u, P = extinction_run
    dt = u.dt
    assert extinction_time_fit(u, 1.5) == pytest.approx(cf.extinction_time(P), abs=2 * dt)
    # the threshold estimator sees the crossing of sup = 1e-3, which the closed form reaches earlier
    exact_cross = 1 - math.sqrt(1e-3 / (0.25 * P.v(0.0)))
    est = extinction_time_estimate(u, 1e-3)
    assert 0 <= est - exact_cross <= 3 * dt
    assert extinction_time_estimate(u, 1e-300) == math.inf


def test_extinction_fit_rejects_slow_diffusion(extinction_run):
    with pytest.raises(ValueError):
        extinction_time_fit(extinction_run[0], 3.0)
