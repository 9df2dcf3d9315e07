import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from riccati_tontine import (MarketParams, MortalityParams, OdeGrid, StochMortParams, calibrate_rho,
                             critical_gamma, expand, golden, hazard, log_utility_bar)
from riccati_tontine.errors import HazardCapError, InvalidGammaError, NoBracketError, OutOfRangeError


@pytest.fixture(scope="module")
def ex(mort, mkt, grid):
    return expand(mort, mkt, StochMortParams(), 20.0, grid)


def reference_zbar(mort, mu, T):
    """k0 and zbar together from an adaptive solver, plus the two integrals."""
    def rhs(t, y):
        k, zb, a, b = y
        lam = hazard(mort, t)
        dk = -(mu + lam) * k + lam * k * k
        dz = (lam - mort.eta) * t * (1 - k) + lam * k * zb
        return [dk, dz, (1 - k) * (lam - mort.eta) * t, k * zb * lam]
    sol = solve_ivp(rhs, (0, T), [1.0, 0.0, 0.0, 0.0], rtol=1e-12, atol=1e-13)
    return sol.y[:, -1]


def test_zbar_matches_adaptive_solver(mort, mkt, ex):
    k, zbar, A, B = reference_zbar(mort, mkt.mu, 20.0)
    assert ex.zbar_T == pytest.approx(zbar, abs=1e-8)
    assert ex.credit_integral == pytest.approx(A, abs=1e-8)
    assert ex.log_coefficient == pytest.approx(B, abs=1e-8)


def test_published_values(ex):
    assert ex.zbar_T == pytest.approx(golden.ZBAR_T, abs=2e-3)
    assert ex.z0[-1] == pytest.approx(golden.Z0_T, abs=5e-4)
    assert ex.z(0.15, 0.109)[-1] == pytest.approx(golden.Z_T_SHIFTED, abs=5e-3)


def test_zbar_shape(ex):
    assert ex.zbar[0] == 0.0
    assert np.all(ex.zbar >= 0)
    assert np.all(np.diff(ex.zbar) >= 0)


def test_other_printed_form_misses(mort, mkt, grid):
    alt = expand(mort, mkt, StochMortParams(), 20.0, grid, form="total")
    assert abs(alt.zbar_T - golden.ZBAR_T) > 0.1


def test_no_noise_no_correction(ex):
    assert np.array_equal(ex.z(0.0, 0.5), ex.z0)
    assert np.array_equal(ex.k(0.0, -0.3), ex.k0)
    assert ex.utility_change(0.0, 0.2) == 0.0


def test_first_order_schedule_keeps_constraint(ex):
    # k z = 1 holds to first order: the product deviates by O(eps^2)
    eps = 1e-3
    prod = ex.k(eps, 0.5) * ex.z(eps, 0.5)
    assert np.max(np.abs(prod - 1)) < 10 * (eps * 0.2 * 0.5 * ex.zbar_T) ** 2


def test_theta0_formula(ex):
    g = 2.0
    want = ex.z0[-1] ** (1 - g) / (1 - g) * math.exp(-g * (1 - g) * 0.04 * 20 / 2)
    assert ex.theta0 == pytest.approx(want, rel=1e-14)


def test_critical_gamma(mort, mkt, grid):
    g0 = critical_gamma(mort, mkt, 20.0, grid)
    assert g0 == pytest.approx(golden.GAMMA0, abs=1e-3)
    ex = expand(mort, mkt, StochMortParams(), 20.0, grid)
    assert g0 == pytest.approx(1 + ex.log_coefficient / ex.credit_integral, abs=1e-9)


def test_critical_gamma_sigma_free(mort, coarse):
    a = critical_gamma(mort, MarketParams(0.07, 0.1), 20.0, coarse)
    b = critical_gamma(mort, MarketParams(0.07, 0.3), 20.0, coarse)
    assert a == pytest.approx(b, abs=1e-10)


def test_thetabar_changes_sign_at_critical_gamma(mort, mkt, grid, ex):
    g0 = critical_gamma(mort, mkt, 20.0, grid)
    below, above = ex.thetabar_at(g0 - 0.01), ex.thetabar_at(g0 + 0.01)
    assert below * above < 0
    # with the signs as computed, thetabar < 0 on (1, g0) and > 0 above
    assert below < 0 < above


def test_preference_contract(mort, mkt, grid):
    # above g0, negative correlation raises utility
    for gamma in (1.2, 2.0, 5.0):
        ex = expand(mort, mkt, StochMortParams(gamma=gamma), 20.0, grid)
        assert ex.theta0 < 0
        assert ex.utility_change(0.15, -0.109) > 0
        assert ex.utility_change(0.15, 0.109) < 0
    # between 1 and g0 positive correlation is preferred
    ex = expand(mort, mkt, StochMortParams(gamma=1.03), 20.0, grid)
    assert ex.utility_change(0.15, 0.109) > 0


@pytest.mark.parametrize("gamma", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_thetabar_positive_below_one(mort, mkt, coarse, gamma):
    assert expand(mort, mkt, StochMortParams(gamma=gamma), 20.0, coarse).thetabar > 0


def test_log_utility_limit(mort, mkt, grid, ex):
    B = log_utility_bar(mort, mkt, 20.0, grid)
    assert B > 0
    assert B == pytest.approx(ex.log_coefficient, rel=1e-14)
    d = 1e-4
    up, down = (ex.thetabar_at(1 - s) / s for s in (d, -d))
    # thetabar/(1-gamma) = (1-gamma) A + B: exact after symmetric averaging,
    # off by d*A on either side
    assert 0.5 * (up + down) == pytest.approx(B, abs=1e-12)
    assert up - B == pytest.approx(d * ex.credit_integral, rel=1e-8)


def test_log_utility_without_mortality(mkt):
    m = MortalityParams(65, 1e9, 1e9, 0.0)  # hazard indistinguishable from zero
    assert log_utility_bar(m, mkt, 20.0, OdeGrid.over(20.0, 200)) == pytest.approx(0.0, abs=1e-12)


def test_gamma_one_rejected(mort, mkt):
    with pytest.raises(InvalidGammaError):
        expand(mort, mkt, StochMortParams(gamma=1.0), 20.0)


def test_cap_below_terminal_hazard(mort, mkt):
    with pytest.raises(HazardCapError):
        expand(mort, mkt, StochMortParams(lambda_inf=0.05), 20.0)


def test_no_bracket(mort, mkt, coarse):
    with pytest.raises(NoBracketError):
        critical_gamma(mort, mkt, 20.0, coarse, lo=1.5, hi=3.0)


def test_calibrate_rho():
    rho = calibrate_rho(1.06, 4.0, 0.15, 10.0, 0.2)
    assert rho == pytest.approx(golden.RHO, abs=1e-3)
    assert rho == pytest.approx(math.log(1.06) / (0.2 * 4 / 1.5), rel=1e-14)
    assert calibrate_rho(1.0, 4.0, 0.15, 10.0, 0.2) == 0.0
    assert calibrate_rho(1.06, 4.0, 0.15, 10.0, 0.4) == pytest.approx(rho / 2, rel=1e-14)
    with pytest.raises(OutOfRangeError):
        calibrate_rho(3.0, 0.5, 0.15, 10.0, 0.2)
    with pytest.raises(ValueError):
        calibrate_rho(1.06, 4.0, 0.0, 10.0, 0.2)


def test_params_validation():
    with pytest.raises(ValueError):
        StochMortParams(rho=1.5)
    with pytest.raises(ValueError):
        StochMortParams(epsilon=-0.1)
    assert StochMortParams(epsilon=0.2).drift(MortalityParams()) == pytest.approx(0.1 + 0.02)
