"""The infinite-pool Riccati tontine.

The recovery schedule solves

    k'(t) = -(mu + lambda(t)) k(t) + lambda(t) k(t)^2,    k(0) = 1,

which keeps the expected payout on death, k(t) E[Z(t)], pinned at 1. With
y = 1/k the equation becomes linear, giving the closed form

    k(t) = 1 / (1 + mu e^{mu t} / p(t) * int_0^t p(s) e^{-mu s} ds).

Neither form involves the fund volatility.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import _ode_kernels as K
from .errors import NonFiniteError
from .mortality import MortalityParams, hazard, survival
from .numerics import OdeGrid, cumulative_simpson

METHODS = (
    "riccati-ode",
    "bernoulli-closed-form",
    "extremal-kappa1",
    "extremal-kappak",
    "extremal-iteration",
    "discrete",
)
_TOL = 1e-9


@dataclass(frozen=True)
class MarketParams:
    mu: float = 0.07
    sigma: float = 0.2

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")


@dataclass(frozen=True, eq=False)
class RecoverySchedule:
    """Recovery fractions k (and optionally lone-survivor fractions kappa) on a
    time grid starting at 0."""

    times: np.ndarray
    k: np.ndarray
    method: str
    kappa: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        k = np.asarray(self.k, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "k", k)
        if self.method not in METHODS:
            raise ValueError(f"unknown schedule method {self.method!r}")
        if times.shape != k.shape or times.ndim != 1:
            raise ValueError("times and k must be 1-d arrays of equal length")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.method != "discrete" and (times[0] != 0.0 or abs(k[0] - 1.0) > _TOL):
            raise ValueError("continuous schedules start at t=0 with k=1")
        if np.any(k < -_TOL) or np.any(k > 1 + _TOL):
            raise ValueError("recovery values must lie in [0, 1]")
        if self.kappa is not None:
            kappa = np.asarray(self.kappa, dtype=float)
            object.__setattr__(self, "kappa", kappa)
            if kappa.shape != k.shape:
                raise ValueError("kappa must match k in shape")
            if np.any(kappa < k - _TOL) or np.any(kappa > 1 + _TOL):
                raise ValueError("need k <= kappa <= 1")

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def grid(self) -> OdeGrid:
        """The uniform grid the schedule lives on."""
        g = OdeGrid(float(self.times[0]), float(self.times[-1]), self.times.size - 1)
        if not np.allclose(g.times, self.times, rtol=0, atol=1e-9 * max(1.0, g.t1)):
            raise ValueError("schedule times are not a uniform grid")
        return g

    def at(self, t):
        """Recovery value at arbitrary times, by cubic interpolation."""
        return _interp(self.times, self.k, t)

    def kappa_at(self, t):
        if self.kappa is None:
            return np.ones_like(np.asarray(t, dtype=float))
        return _interp(self.times, self.kappa, t)

    def value_at_node(self, t: float) -> float:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9:
            raise ValueError(f"{t} is not a schedule node")
        return float(self.k[i])


def _interp(times, values, t):
    spline = CubicSpline(times, values)
    return np.clip(spline(np.asarray(t, dtype=float)), 0.0, 1.0)


def on_half_grid(times, values, grid: OdeGrid) -> np.ndarray:
    """Values at the nodes and midpoints of ``grid``.

    When ``values`` already lives on the nodes of ``grid``, midpoints come from
    the local 4-point cubic, keeping the effect of any kink (e.g. a clamp at
    zero) confined to neighbouring panels.
    """
    values = np.asarray(values, dtype=float)
    times = np.asarray(times, dtype=float)
    if times.size == grid.steps + 1 and np.allclose(times, grid.times, rtol=0, atol=1e-9):
        out = np.empty(2 * grid.steps + 1)
        out[0::2] = values
        if grid.steps >= 3:
            mid = np.empty(grid.steps)
            mid[1:-1] = (-values[:-3] + 9.0 * values[1:-2] + 9.0 * values[2:-1] - values[3:]) / 16.0
            mid[0] = (5.0 * values[0] + 15.0 * values[1] - 5.0 * values[2] + values[3]) / 16.0
            mid[-1] = (values[-4] - 5.0 * values[-3] + 15.0 * values[-2] + 5.0 * values[-1]) / 16.0
        else:
            mid = 0.5 * (values[:-1] + values[1:])
        out[1::2] = mid
        return np.clip(out, 0.0, 1.0)
    return _interp(times, values, grid.half_times)


def _grid(T, grid):
    grid = OdeGrid.over(T) if grid is None else grid
    if grid.t0 != 0.0 or abs(grid.t1 - T) > 1e-12:
        raise ValueError(f"grid must span [0, {T}], got [{grid.t0}, {grid.t1}]")
    return grid


def riccati_schedule_ode(mort: MortalityParams, mkt: MarketParams, T: float,
                         grid: OdeGrid | None = None) -> RecoverySchedule:
    if not T > 0:
        raise ValueError(f"horizon must be positive, got {T}")
    grid = _grid(T, grid)
    lam_half = hazard(mort, grid.half_times)
    k = K.riccati_rk4(lam_half, grid.h, mkt.mu)
    if not np.all(np.isfinite(k)):
        raise NonFiniteError("Riccati integration produced non-finite values")
    return RecoverySchedule(grid.times, k, "riccati-ode", meta={"steps": grid.steps})


def riccati_schedule_closed_form(mort: MortalityParams, mkt: MarketParams, T: float,
                                 grid: OdeGrid | None = None) -> RecoverySchedule:
    if not T > 0:
        raise ValueError(f"horizon must be positive, got {T}")
    grid = _grid(T, grid)
    mu = mkt.mu
    th = grid.half_times
    integral = cumulative_simpson(survival(mort, th) * np.exp(-mu * th), grid.h)
    t = grid.times
    y = 1.0 + mu * np.exp(mu * t) / survival(mort, t) * integral
    return RecoverySchedule(t, 1.0 / y, "bernoulli-closed-form", meta={"steps": grid.steps})


def infinite_pool_z(schedule: RecoverySchedule, mort: MortalityParams, mkt: MarketParams) -> np.ndarray:
    """Expected appreciation exp(mu t + int_0^t (1 - k) lambda ds) on the
    schedule's grid."""
    grid = schedule.grid()
    th = grid.half_times
    k_half = on_half_grid(schedule.times, schedule.k, grid)
    credits = cumulative_simpson((1.0 - k_half) * hazard(mort, th), grid.h)
    return np.exp(mkt.mu * grid.times + credits)


def infinite_pool_stddev(zT: float, mkt: MarketParams, T: float) -> float:
    """Standard deviation of the terminal payout of a lognormal fund with mean zT."""
    if not zT > 0 or not T > 0:
        raise ValueError("need zT > 0 and T > 0")
    return float(zT * np.sqrt(np.expm1(mkt.sigma ** 2 * T)))
