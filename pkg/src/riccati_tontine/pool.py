"""Finite-pool tontines via moment ODEs.

With the representative agent forced to stay alive, let u_j(t) be the
expected fund value on the event of j survivors. For 1 <= j <= n,

    u_j' = mu u_j + lambda [ j (1 - k/(j+1)) u_{j+1} - (j-1) u_j ],
    u_j(0) = n 1{j=n},  u_{n+1} = 0,

and the agent's expected account value is z = sum_j u_j / j. The death
coefficient is (j-1) lambda rather than j lambda because the agent is one of
the j survivors and cannot die; this is deliberate.

Expected payout to an agent dying at t is k z + (kappa - k) u_1, so

* extremal with kappa = 1 means k (z - u_1) + u_1 = 1,
* extremal with kappa = k means k z = 1,

and these two bracket the Riccati schedule from below and above.
Second moments v_j = E[L^2; N=j] follow the analogous system with
(2 mu + sigma^2) growth and squared haircuts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _ode_kernels as K
from .errors import DegenerateDenominatorError, NegativeVarianceError, NoConvergenceError, NonFiniteError
from .mortality import MortalityParams, hazard
from .numerics import OdeGrid
from .riccati import MarketParams, RecoverySchedule, on_half_grid, riccati_schedule_ode

U1_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class PoolMoments:
    """Moment trajectories for a pool of size ``n``.

    ``z``, ``u1``, ``u2`` and ``k`` are given at every grid node; the full
    vectors ``u`` (and ``v``) at ``u_times``, every ``stride``-th node.
    """

    n: int
    times: np.ndarray
    k: np.ndarray
    z: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    u_times: np.ndarray
    u: np.ndarray
    v: np.ndarray | None = None
    second_moment: np.ndarray | None = None

    @property
    def zT(self) -> float:
        return float(self.z[-1])

    def death_payout(self, kappa=1.0) -> np.ndarray:
        """E[K_t Z_t-] for an agent dying at each node: k z + (kappa - k) u_1."""
        return self.k * self.z + (np.asarray(kappa, dtype=float) - self.k) * self.u1

    def stddev(self) -> np.ndarray:
        """Payout standard deviation at every node (requires second moments)."""
        if self.second_moment is None:
            raise ValueError("second moments were not propagated")
        return _stddev(self.second_moment, self.z)


def _stddev(second, z):
    var = np.asarray(second - z * z, dtype=float)
    if np.any(var < -1e-9 * np.maximum(1.0, z * z)):
        raise NegativeVarianceError(f"variance {var.min():.3g} < 0; refine the grid")
    return np.sqrt(np.maximum(var, 0.0))


def _check_n(n):
    if int(n) != n or n < 2:
        raise ValueError(f"pool size must be an integer >= 2, got {n}")
    return int(n)


def _grid(T, grid):
    grid = OdeGrid.over(T) if grid is None else grid
    if grid.t0 != 0.0 or abs(grid.t1 - T) > 1e-12:
        raise ValueError(f"grid must span [0, {T}]")
    return grid


def _stride_for(grid, stride):
    if stride is None:
        stride = 1
    if grid.steps % stride:
        raise ValueError(f"stride {stride} must divide the step count {grid.steps}")
    return stride


def _run(n, mode, k_half, mort, mkt, grid, with_v=False, stride=1) -> PoolMoments:
    lam_half = hazard(mort, grid.half_times)
    if k_half is None:
        k_half = np.zeros(1)
    (k, z, u1, u2, w, u_rec, v_rec, status, at) = K.moments_rk4(
        lam_half, np.ascontiguousarray(k_half, dtype=float), grid.h, n, mkt.mu, mkt.sigma,
        mode, with_v, stride)
    t = grid.times
    if status == K.NONFINITE:
        raise NonFiniteError(f"moment system blew up at t={t[at]:.6g}")
    if status == K.DEGENERATE:
        raise DegenerateDenominatorError(
            f"sum_(j>=2) u_j/j fell below {K.DENOM_FLOOR} at t={t[at]:.6g}")
    return PoolMoments(
        n=n, times=t, k=k, z=z, u1=u1, u2=u2, u_times=t[::stride], u=u_rec,
        v=v_rec if with_v else None, second_moment=w if with_v else None)


def propagate_moments(n: int, schedule: RecoverySchedule, mort: MortalityParams, mkt: MarketParams,
                      grid: OdeGrid | None = None, stride: int | None = None) -> PoolMoments:
    n = _check_n(n)
    grid = schedule.grid() if grid is None else grid
    if grid.t1 > schedule.horizon + 1e-12:
        raise ValueError("schedule does not cover the grid")
    k_half = on_half_grid(schedule.times, schedule.k, grid)
    return _run(n, K.GIVEN, k_half, mort, mkt, grid, stride=_stride_for(grid, stride))


def extremal_kappa1_schedule(n: int, mort: MortalityParams, mkt: MarketParams, T: float,
                             grid: OdeGrid | None = None):
    """Extremal schedule when a lone survivor may withdraw everything."""
    n = _check_n(n)
    grid = _grid(T, grid)
    mom = _run(n, K.KAPPA1, None, mort, mkt, grid)
    sched = RecoverySchedule(grid.times, mom.k, "extremal-kappa1", kappa=np.ones_like(mom.k),
                             meta={"n": n, "steps": grid.steps})
    return sched, mom


def extremal_kappak_schedule(n: int, mort: MortalityParams, mkt: MarketParams, T: float,
                             grid: OdeGrid | None = None):
    """Extremal schedule when the lone survivor is paid at the ordinary rate."""
    n = _check_n(n)
    grid = _grid(T, grid)
    mom = _run(n, K.KAPPAK, None, mort, mkt, grid)
    if np.any(mom.k < 0) or np.any(mom.k > 1 + 1e-9):
        raise NonFiniteError("kappa=k extremal recovery left [0, 1]")
    sched = RecoverySchedule(grid.times, mom.k, "extremal-kappak", kappa=mom.k.copy(),
                             meta={"n": n, "steps": grid.steps})
    return sched, mom


def riccati_extremal_kappa(n: int, mort: MortalityParams, mkt: MarketParams, T: float,
                           grid: OdeGrid | None = None) -> np.ndarray:
    """Lone-survivor fractions that make the Riccati schedule extremal.

    Solves k z + (kappa - k) u_1 = 1 at each node. Where u_1 is below
    ``U1_FLOOR`` (t near 0) no lone-survivor state has mass and kappa is
    reported as 1. The result is clamped to [k, 1].
    """
    n = _check_n(n)
    grid = _grid(T, grid)
    sched = riccati_schedule_ode(mort, mkt, T, grid)
    mom = propagate_moments(n, sched, mort, mkt, grid)
    kappa = np.ones_like(mom.z)
    ok = mom.u1 > U1_FLOOR
    kappa[ok] = (1.0 - mom.k[ok] * mom.z[ok]) / mom.u1[ok] + mom.k[ok]
    return np.clip(kappa, mom.k, 1.0)


def extremal_iteration_solve(n: int, kappa, mort: MortalityParams, mkt: MarketParams, T: float,
                             grid: OdeGrid | None = None, tol: float = 1e-9,
                             max_iter: int = 200) -> RecoverySchedule:
    """Extremal schedule for a given kappa by fixed-point iteration.

    Starting from a feasible schedule, repeatedly propagate the moments and
    lower the schedule to

        l(t) = max(0, (1 - kappa(t) u_1(t)) / sum_{j>=2} u_j(t)/j)

    until the sup-norm change drops below ``tol``. ``kappa`` is a constant, an
    array on the grid nodes, or the string ``"k"`` for kappa equal to the
    schedule itself.
    """
    n = _check_n(n)
    grid = _grid(T, grid)
    t = grid.times
    self_consistent = isinstance(kappa, str)
    if self_consistent:
        if kappa != "k":
            raise ValueError(f"unknown kappa policy {kappa!r}")
        fixed = None
    else:
        fixed = np.broadcast_to(np.asarray(kappa, dtype=float), t.shape).copy()
        if np.any(fixed < 0) or np.any(fixed > 1):
            raise ValueError("kappa must lie in [0, 1]")
    ell = np.ones_like(t) if fixed is None else fixed.copy()
    ell[0] = 1.0
    for it in range(1, max_iter + 1):
        mom = _run(n, K.GIVEN, on_half_grid(t, ell, grid), mort, mkt, grid)
        s2 = mom.z - mom.u1
        if np.any(s2 < K.DENOM_FLOOR):
            raise DegenerateDenominatorError("sum_(j>=2) u_j/j vanished during iteration")
        kap = ell if fixed is None else fixed
        new = np.clip((1.0 - kap * mom.u1) / s2, 0.0, 1.0)
        if fixed is not None:
            new = np.minimum(new, fixed)
        change = float(np.max(np.abs(new - ell)))
        ell = new
        if change < tol:
            kap_out = ell.copy() if fixed is None else np.maximum(fixed, ell)
            return RecoverySchedule(t, ell, "extremal-iteration", kappa=kap_out,
                                    meta={"n": n, "iterations": it, "steps": grid.steps})
    raise NoConvergenceError(f"no convergence after {max_iter} iterations (last change {change:.3g})")


@dataclass(frozen=True, eq=False)
class VarianceResult:
    moments: PoolMoments
    stddev_curve: np.ndarray

    @property
    def stddev(self) -> float:
        return float(self.stddev_curve[-1])

    @property
    def zT(self) -> float:
        return self.moments.zT


def propagate_variance(n: int, schedule: RecoverySchedule, mort: MortalityParams, mkt: MarketParams,
                       grid: OdeGrid | None = None, stride: int | None = None) -> VarianceResult:
    """Propagate first and second moments; payout stddev = sqrt(sum v_j/j^2 - z^2)."""
    n = _check_n(n)
    grid = schedule.grid() if grid is None else grid
    if stride is None:
        stride = grid.steps if n > 50 else 1
    k_half = on_half_grid(schedule.times, schedule.k, grid)
    mom = _run(n, K.GIVEN, k_half, mort, mkt, grid, with_v=True, stride=_stride_for(grid, stride))
    return VarianceResult(mom, _stddev(mom.second_moment, mom.z))
