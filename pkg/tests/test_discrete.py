import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import binom

from riccati_tontine import (DiscreteSpec, MarketParams, MortalityParams, OdeGrid, discrete_schedule, golden,
                             period_survival, riccati_schedule_ode, simulate_periodic)


def binomial_recursion(spec):
    """Same model, written over the number l of members alive at the period start."""
    n, g = spec.n, math.exp(spec.delta * spec.mkt.mu)
    u = np.zeros(n + 1)
    u[n] = n
    ks = []
    for i in range(1, spec.periods + 1):
        p = period_survival(spec.mort, i, spec.delta)
        k = 1.0 / (g * sum(u[j] / j for j in range(1, n + 1)))
        new = np.zeros(n + 1)
        for l in range(1, n + 1):
            for j in range(1, l + 1):
                # the agent survives; j - 1 of the other l - 1 do too
                new[j] += binom.pmf(j - 1, l - 1, p) * u[l] * (g - k * (l - j) / l)
        u = new
        ks.append(k)
    return np.array(ks), u[1:]


@pytest.fixture(scope="module")
def pool20():
    return discrete_schedule(DiscreteSpec(20, 20))


def test_first_period(pool20):
    assert pool20.k[0] == pytest.approx(math.exp(-0.07), abs=1e-15)
    assert pool20.k[0] == pytest.approx(golden.DISCRETE_K1, abs=golden.TOL_QUOTED_4DP)


def test_last_period(pool20):
    assert pool20.k[-1] == pytest.approx(golden.DISCRETE_K20, abs=golden.TOL_DISCRETE_K20)


def test_binomial_form_agrees():
    spec = DiscreteSpec(7, 10, 20.0)
    res = discrete_schedule(spec)
    k, u = binomial_recursion(spec)
    assert np.max(np.abs(res.k - k)) < 1e-12
    assert np.max(np.abs(res.u[-1] - u)) < 1e-11


def test_zero_drift():
    res = discrete_schedule(DiscreteSpec(10, 20, mkt=MarketParams(0.0, 0.2)))
    assert np.allclose(res.k, 1.0, rtol=0, atol=1e-12)


def test_decreasing(pool20):
    assert np.all(pool20.k > 0) and np.all(pool20.k <= 1)
    assert np.all(np.diff(pool20.k) < 0)


def test_refinement_approaches_continuous(mort, mkt, grid):
    target = riccati_schedule_ode(mort, mkt, 20.0, grid).k[-1]
    gaps = []
    for M in (20, 80, 320):
        gaps.append(abs(discrete_schedule(DiscreteSpec(20, M)).k[-1] - target))
    assert gaps[0] > gaps[1] > gaps[2]


def test_large_pool_is_stable():
    res = discrete_schedule(DiscreteSpec(400, 20))
    assert np.all(np.isfinite(res.u))
    assert np.all(np.diff(res.k) < 0)


@given(st.integers(2, 12), st.integers(1, 12), st.floats(0.0, 0.12))
def test_payout_constraint_and_bounds(n, M, mu):
    spec = DiscreteSpec(n, M, 10.0, MortalityParams(), MarketParams(mu, 0.2))
    res = discrete_schedule(spec)
    g = math.exp(spec.delta * mu)
    s = res.u[:-1] @ (1.0 / np.arange(1, n + 1))
    assert np.allclose(res.k * g * s, 1.0, rtol=1e-12)
    assert np.all(res.k > 0) and np.all(res.k <= 1 + 1e-12)
    assert np.all(res.u >= 0)


def test_schedule_wrapper(pool20):
    s = pool20.schedule()
    assert s.method == "discrete"
    assert s.times[0] == 1.0 and s.times[-1] == 20.0


def test_rejects_bad_spec():
    with pytest.raises(ValueError):
        DiscreteSpec(1, 10)
    with pytest.raises(ValueError):
        DiscreteSpec(5, 0)


@pytest.mark.slow
def test_monte_carlo_oracle():
    spec = DiscreteSpec(5, 4)
    res = discrete_schedule(spec)
    sim = simulate_periodic(spec, res.k, paths=100_000, seed=11)
    fund = res.u[1:].sum(axis=1)
    assert np.all(np.abs(sim.fund - fund) <= 3 * sim.fund_se)
    assert np.all(np.abs(sim.z - res.z) <= 3 * sim.z_se)
    assert np.all(np.abs(sim.death_payout - 1.0) <= 3 * sim.death_payout_se)
