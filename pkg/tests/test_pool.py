import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from riccati_tontine import (MarketParams, OdeGrid, RecoverySchedule, extremal_iteration_solve,
                             extremal_kappa1_schedule, extremal_kappak_schedule, golden, hazard,
                             infinite_pool_stddev, infinite_pool_z, propagate_moments, propagate_variance,
                             riccati_extremal_kappa, riccati_schedule_ode)
from riccati_tontine.errors import NoConvergenceError

BRACKET_N = (2, 3, 5, 10, 20)


@pytest.fixture(scope="module")
def ric(mort, mkt, grid):
    return riccati_schedule_ode(mort, mkt, 20.0, grid)


def lemma_rhs(n, mort, mu, kfun):
    j = np.arange(1, n + 1, dtype=float)

    def rhs(t, u):
        lam, k = hazard(mort, t), kfun(t)
        up = np.append(u[1:], 0.0)
        return mu * u + lam * (j * (1 - k / (j + 1)) * up - (j - 1) * u)
    return rhs


def second_moment_rhs(n, mort, mu, sigma, kfun):
    j = np.arange(1, n + 1, dtype=float)

    def rhs(t, v):
        lam, k = hazard(mort, t), kfun(t)
        vp = np.append(v[1:], 0.0)
        return v * (2 * mu + sigma ** 2 - (j - 1) * lam) + vp * lam * j * (1 - k / (j + 1)) ** 2
    return rhs


def test_moments_match_adaptive_solver(mort, mkt, ric):
    n = 6
    u0 = np.zeros(n)
    u0[-1] = n
    sol = solve_ivp(lemma_rhs(n, mort, mkt.mu, ric.at), (0, 20), u0, rtol=1e-11, atol=1e-12,
                    t_eval=[5.0, 12.0, 20.0])
    zs = (sol.y / np.arange(1, n + 1)[:, None]).sum(axis=0)
    mom = propagate_moments(n, ric, mort, mkt)
    got = np.interp([5.0, 12.0, 20.0], mom.times, mom.z)
    assert np.max(np.abs(got - zs)) < 1e-7


def test_initial_state_and_sum(mort, mkt, ric):
    mom = propagate_moments(7, ric, mort, mkt, stride=1000)
    assert np.array_equal(mom.u[0], [0, 0, 0, 0, 0, 0, 7])
    j = np.arange(1, 8)
    assert np.allclose((mom.u / j).sum(axis=1), mom.z[::1000], rtol=1e-13, atol=0)
    assert np.all(mom.u >= -1e-15)
    assert np.allclose(mom.u[:, 0], mom.u1[::1000])


def test_expected_credit_dynamics(mort, mkt, ric):
    # z' = mu z + (1 - k) lambda (z - u_1), checked with central differences
    mom = propagate_moments(10, ric, mort, mkt)
    h = mom.times[1] - mom.times[0]
    dz = (mom.z[2:] - mom.z[:-2]) / (2 * h)
    t = mom.times[1:-1]
    want = mkt.mu * mom.z[1:-1] + (1 - mom.k[1:-1]) * hazard(mort, t) * (mom.z[1:-1] - mom.u1[1:-1])
    assert np.max(np.abs(dz - want) / mom.z[1:-1]) < 1e-6


@pytest.mark.parametrize("n", [10, 50])
def test_riccati_column(mort, mkt, ric, n):
    mom = propagate_moments(n, ric, mort, mkt)
    assert mom.zT == pytest.approx(golden.TABLE2[n][1][1], abs=golden.TOL_TABLE2)


def test_kappa1_examples(mort, mkt, grid):
    s2, m2 = extremal_kappa1_schedule(2, mort, mkt, 20.0, grid)
    assert s2.k[-1] == 0.0
    assert m2.zT == pytest.approx(5.78882, abs=golden.TOL_TABLE2)
    s10, m10 = extremal_kappa1_schedule(10, mort, mkt, 20.0, grid)
    assert s10.k[0] == 1.0
    assert s10.k[-1] == pytest.approx(0.117374, abs=golden.TOL_TABLE2)
    assert m10.zT == pytest.approx(6.96237, abs=golden.TOL_TABLE2)
    assert np.all(s10.kappa == 1.0)


def test_kappak_examples(mort, mkt, grid):
    for n, (k, z) in ((2, (0.188823, 5.29598)), (5, (0.150730, 6.63437)), (50, (0.143629, 6.96237))):
        s, m = extremal_kappak_schedule(n, mort, mkt, 20.0, grid)
        assert s.k[-1] == pytest.approx(k, abs=golden.TOL_TABLE2)
        assert m.zT == pytest.approx(z, abs=golden.TOL_TABLE2)
        assert np.array_equal(s.kappa, s.k)
        assert np.max(np.abs(s.k * m.z - 1.0)) < 1e-8


@pytest.mark.parametrize("n", BRACKET_N)
def test_bracketing(mort, mkt, coarse, n):
    ric = riccati_schedule_ode(mort, mkt, 20.0, coarse)
    lo, _ = extremal_kappa1_schedule(n, mort, mkt, 20.0, coarse)
    hi, _ = extremal_kappak_schedule(n, mort, mkt, 20.0, coarse)
    assert np.all(lo.k <= ric.k + 1e-12)
    assert np.all(ric.k <= hi.k + 1e-12)


def test_riccati_inequalities(mort, mkt, ric):
    mom = propagate_moments(10, ric, mort, mkt)
    kz = mom.k * mom.z
    assert np.all(kz <= 1 + 1e-10)
    assert np.all(kz + (1 - mom.k) * mom.u1 >= 1 - 1e-10)


def test_death_payout_nondecreasing(mort, mkt, ric):
    pay = propagate_moments(5, ric, mort, mkt).death_payout(1.0)
    assert pay[0] == pytest.approx(1.0)
    assert np.all(np.diff(pay) >= -1e-12)


def test_riccati_kappa_range(mort, mkt, grid, ric):
    kap = riccati_extremal_kappa(3, mort, mkt, 20.0, grid)
    assert kap[0] == 1.0
    assert ric.k[-1] <= kap[-1] <= 1.0
    assert np.all(kap >= ric.k) and np.all(kap <= 1)
    # the formula itself, away from t = 0
    mom = propagate_moments(3, ric, mort, mkt, grid)
    i = grid.index_of(15.0)
    assert mom.death_payout(kap)[i] == pytest.approx(1.0, abs=1e-10)


def test_iteration_reaches_kappa1(mort, mkt, coarse):
    direct, _ = extremal_kappa1_schedule(10, mort, mkt, 20.0, coarse)
    it = extremal_iteration_solve(10, 1.0, mort, mkt, 20.0, coarse)
    assert it.method == "extremal-iteration"
    assert np.max(np.abs(it.k - direct.k)) < 1e-6


def test_iteration_reaches_kappak(mort, mkt, coarse):
    direct, _ = extremal_kappak_schedule(5, mort, mkt, 20.0, coarse)
    it = extremal_iteration_solve(5, "k", mort, mkt, 20.0, coarse)
    assert np.max(np.abs(it.k - direct.k)) < 1e-6


def test_iteration_large_pool(mort, mkt, coarse):
    it = extremal_iteration_solve(50, 1.0, mort, mkt, 20.0, coarse)
    ric = riccati_schedule_ode(mort, mkt, 20.0, coarse)
    assert np.max(np.abs(it.k - ric.k)) < 1e-5


def test_iteration_cap(mort, mkt, coarse):
    with pytest.raises(NoConvergenceError):
        extremal_iteration_solve(10, 1.0, mort, mkt, 20.0, coarse, max_iter=2)


def test_gap_shrinks_with_pool_size(mort, mkt, ric):
    target = 1.0 / ric.k[-1]
    gaps = [abs(propagate_moments(n, ric, mort, mkt).zT - target) for n in (2, 3, 5, 10, 20, 50)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_variance_matches_adaptive_solver(mort, mkt, ric):
    n = 4
    v0 = np.zeros(n)
    v0[-1] = n * n
    sol = solve_ivp(second_moment_rhs(n, mort, mkt.mu, mkt.sigma, ric.at), (0, 20), v0,
                    rtol=1e-11, atol=1e-12)
    second = (sol.y[:, -1] / np.arange(1, n + 1) ** 2).sum()
    res = propagate_variance(n, ric, mort, mkt)
    assert res.moments.second_moment[-1] == pytest.approx(second, rel=1e-8)


@pytest.mark.parametrize("n", [2, 10])
def test_variance_examples(mort, mkt, ric, n):
    assert propagate_variance(n, ric, mort, mkt).stddev == pytest.approx(golden.TABLE3[n], abs=golden.TOL_TABLE3)


def test_variance_large_pool_near_limit(mort, mkt, ric):
    sd = propagate_variance(1000, ric, mort, mkt).stddev
    assert sd == pytest.approx(golden.TABLE3[1000], abs=golden.TOL_TABLE3)
    limit = infinite_pool_stddev(infinite_pool_z(ric, mort, mkt)[-1], mkt, 20.0)
    assert abs(sd / limit - 1) < 1e-3


def test_deterministic_conserving_pool_has_no_spread(mort):
    g = OdeGrid.over(20.0, 2000)
    ones = RecoverySchedule(g.times, np.ones(g.steps + 1), "riccati-ode")
    res = propagate_variance(6, ones, mort, MarketParams(0.0, 0.0), g)
    assert np.max(res.stddev_curve) < 1e-6
    assert res.zT == pytest.approx(1.0, abs=1e-12)


def test_rejects_small_pool(mort, mkt, ric):
    with pytest.raises(ValueError):
        propagate_moments(1, ric, mort, mkt)
    with pytest.raises(ValueError):
        extremal_kappa1_schedule(1.5, mort, mkt, 20.0)
