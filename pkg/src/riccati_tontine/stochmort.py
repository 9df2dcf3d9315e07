"""First-order asymptotics for a stochastic, asset-correlated hazard.

The hazard follows d(Lambda - eta) = (Lambda - eta)(g dt + eps dW) with
g = 1/b + eps^2/2, so its median path is the Gompertz-Makeham curve, and W is
correlated with the fund's Brownian motion at rate rho. For an infinite pool
and small eps,

    z_t   = z0_t (1 + eps sigma rho zbar_t) + O(eps^2)
    theta = theta0 (1 + eps sigma rho thetabar)

where z0 = 1/k0 comes from the deterministic Riccati schedule k0,

    zbar' = (lambda - eta) t (1 - k0) + lambda k0 zbar,     zbar(0) = 0,
    theta0 = z0_T^(1-gamma) / (1-gamma) * exp(-gamma (1-gamma) sigma^2 T / 2),
    thetabar = (1-gamma) [(1-gamma) A + B],
    A = int_0^T (1 - k0) (lambda - eta) s ds,   B = int_0^T k0 zbar lambda ds.

B alone is the first-order coefficient for log utility. thetabar changes
sign at gamma0 = 1 + B/A, independent of sigma and rho.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from . import _ode_kernels as K
from .errors import HazardCapError, InvalidGammaError, OutOfRangeError
from .mortality import MortalityParams, hazard
from .numerics import OdeGrid, find_root
from .riccati import MarketParams, on_half_grid, riccati_schedule_ode

# "excess" drives zbar with (lambda - eta) t (1 - k0); "total" with lambda t (1 - k0)
ZBAR_FORMS = ("excess", "total")


@dataclass(frozen=True)
class StochMortParams:
    epsilon: float = 0.15
    rho: float = 0.109
    lambda_inf: float = 1.0
    gamma: float = 2.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if abs(self.rho) > 1:
            raise ValueError("correlation must lie in [-1, 1]")
        if not self.lambda_inf > 0:
            raise ValueError("hazard cap must be positive")

    def drift(self, mort: MortalityParams) -> float:
        """g = 1/b + eps^2/2, making the median hazard path Gompertz-Makeham."""
        return 1.0 / mort.b + 0.5 * self.epsilon ** 2


@dataclass(frozen=True, eq=False)
class AsymptoticExpansion:
    times: np.ndarray
    k0: np.ndarray
    z0: np.ndarray
    zbar: np.ndarray
    gamma: float
    sigma: float
    T: float
    credit_integral: float  # A
    log_coefficient: float  # B

    @property
    def zbar_T(self) -> float:
        return float(self.zbar[-1])

    @property
    def theta0(self) -> float:
        return theta0(self.z0[-1], self.gamma, self.sigma, self.T)

    @property
    def thetabar(self) -> float:
        return self.thetabar_at(self.gamma)

    def thetabar_at(self, gamma: float) -> float:
        g1 = 1.0 - gamma
        return g1 * (g1 * self.credit_integral + self.log_coefficient)

    def z(self, epsilon: float, rho: float, sigma: float | None = None) -> np.ndarray:
        sigma = self.sigma if sigma is None else sigma
        return self.z0 * (1.0 + epsilon * sigma * rho * self.zbar)

    def k(self, epsilon: float, rho: float, sigma: float | None = None) -> np.ndarray:
        """First-order recovery schedule k0 (1 - eps sigma rho zbar)."""
        sigma = self.sigma if sigma is None else sigma
        return self.k0 * (1.0 - epsilon * sigma * rho * self.zbar)

    def theta(self, epsilon: float, rho: float) -> float:
        return self.theta0 * (1.0 + epsilon * self.sigma * rho * self.thetabar)

    def utility_change(self, epsilon: float, rho: float) -> float:
        """First-order change in CRRA utility, theta0 eps sigma rho thetabar."""
        return self.theta0 * epsilon * self.sigma * rho * self.thetabar


def theta0(z0T: float, gamma: float, sigma: float, T: float) -> float:
    if gamma == 1.0:
        raise InvalidGammaError("gamma = 1 is log utility; use log_utility_bar")
    g1 = 1.0 - gamma
    return z0T ** g1 / g1 * math.exp(-0.5 * gamma * g1 * sigma ** 2 * T)


def _zbar_parts(mort, mkt, T, grid, form):
    if form not in ZBAR_FORMS:
        raise ValueError(f"form must be one of {ZBAR_FORMS}")
    grid = OdeGrid.over(T) if grid is None else grid
    k0 = riccati_schedule_ode(mort, mkt, T, grid)
    th = grid.half_times
    lam = hazard(mort, th)
    k_half = on_half_grid(k0.times, k0.k, grid)
    excess = lam - mort.eta if form == "excess" else lam
    zbar = K.linear_rk4(excess * th * (1.0 - k_half), lam * k_half, grid.h, 0.0)
    return grid, k0.k, zbar


def expand(mort: MortalityParams, mkt: MarketParams, sm: StochMortParams, T: float,
           grid: OdeGrid | None = None, form: str = "excess") -> AsymptoticExpansion:
    if sm.gamma == 1.0:
        raise InvalidGammaError("gamma = 1 is log utility; use log_utility_bar")
    lam_T = float(hazard(mort, T))
    if lam_T >= sm.lambda_inf:
        raise HazardCapError(f"hazard cap {sm.lambda_inf} must exceed lambda_T = {lam_T:.4g}")
    grid, k0, zbar = _zbar_parts(mort, mkt, T, grid, form)
    t = grid.times
    lam = hazard(mort, t)
    A = simpson((1.0 - k0) * (lam - mort.eta) * t, dx=grid.h)
    B = simpson(k0 * zbar * lam, dx=grid.h)
    return AsymptoticExpansion(t, k0, 1.0 / k0, zbar, sm.gamma, mkt.sigma, T, float(A), float(B))


def critical_gamma(mort: MortalityParams, mkt: MarketParams, T: float, grid: OdeGrid | None = None,
                   lo: float = 1.0 + 1e-6, hi: float = 3.0, tol: float = 1e-10) -> float:
    """Risk aversion above which negative asset-mortality correlation is preferred."""
    ex = expand(mort, mkt, StochMortParams(gamma=2.0, lambda_inf=math.inf), T, grid)
    return find_root(ex.thetabar_at, lo, hi, tol)


def log_utility_bar(mort: MortalityParams, mkt: MarketParams, T: float, grid: OdeGrid | None = None) -> float:
    """First-order log-utility coefficient int_0^T k0 zbar lambda ds."""
    grid, k0, zbar = _zbar_parts(mort, mkt, T, grid, "excess")
    return float(simpson(k0 * zbar * hazard(mort, grid.times), dx=grid.h))


def calibrate_rho(market_move: float, aging_years: float, epsilon: float, b: float, sigma: float) -> float:
    """Correlation implied by a one-year shock that ages the cohort by
    ``aging_years`` and moves the fund by the factor ``market_move``."""
    if not (epsilon > 0 and b > 0 and sigma > 0 and market_move > 0):
        raise ValueError("epsilon, b, sigma and market_move must be positive")
    w1 = aging_years / (epsilon * b)
    if w1 == 0:
        return 0.0
    rho = math.log(market_move) / (sigma * w1)
    if abs(rho) > 1:
        raise OutOfRangeError(f"implied correlation {rho:.4g} outside [-1, 1]")
    return rho
