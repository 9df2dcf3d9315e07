"""Monte Carlo pool simulator, used as an oracle for the ODE moment systems.

The fund follows GBM between deaths. When one of the other members dies
with N survivors just before, the fund pays out K * Z and every survivor's
account jumps by Z * (1 - K) / (N - 1). Death times come from inverse
transform of the closed-form survival curve, so mortality carries no
time-step bias.

Paths are split into fixed-size streams. Stream ``i`` draws from
``SeedSequence(seed, spawn_key=(i,))`` and results are concatenated in stream
order, so output depends only on the seed, never on ``workers``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _mc_kernels as MK
from .discrete import DiscreteSpec
from .errors import InvalidConfigError
from .mortality import MortalityParams, hazard
from .riccati import MarketParams, RecoverySchedule, infinite_pool_z

DEFAULT_CHUNK = 8192


@dataclass(frozen=True)
class CappedGBMHazard:
    """Hazard eta + X with X a GBM (median path Gompertz), frozen on reaching
    ``lambda_inf``; its noise has correlation ``rho`` with the fund."""

    epsilon: float
    rho: float
    lambda_inf: float = 1.0

    def __post_init__(self):
        if self.epsilon < 0 or abs(self.rho) > 1 or not self.lambda_inf > 0:
            raise InvalidConfigError("need epsilon >= 0, |rho| <= 1, lambda_inf > 0")


@dataclass(frozen=True, eq=False)
class SimConfig:
    n: int | None  # None: infinite pool
    T: float
    schedule: RecoverySchedule
    mort: MortalityParams = MortalityParams()
    mkt: MarketParams = MarketParams()
    paths: int = 100_000
    seed: int = 0
    dt: float = 0.01
    kappa_policy: object = "one"  # "one" | "k" | array on schedule.times
    hazard: CappedGBMHazard | None = None
    chunk: int = DEFAULT_CHUNK
    workers: int = 1

    def __post_init__(self):
        if self.n is not None and (int(self.n) != self.n or self.n < 2):
            raise InvalidConfigError(f"pool size must be an integer >= 2 or None, got {self.n}")
        if not self.T > 0 or not self.dt > 0:
            raise InvalidConfigError("T and dt must be positive")
        if self.paths < 1 or self.chunk < 1 or self.workers < 1:
            raise InvalidConfigError("paths, chunk and workers must be positive")
        if self.schedule.horizon < self.T - 1e-12:
            raise InvalidConfigError("schedule does not reach the horizon")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidConfigError("seed must be a 64-bit unsigned integer")
        if isinstance(self.kappa_policy, str) and self.kappa_policy not in ("one", "k"):
            raise InvalidConfigError(f"unknown kappa policy {self.kappa_policy!r}")

    def kappa_at(self, t):
        t = np.asarray(t, dtype=float)
        if isinstance(self.kappa_policy, str):
            return np.ones_like(t) if self.kappa_policy == "one" else self.schedule.at(t)
        return np.interp(t, self.schedule.times, np.asarray(self.kappa_policy, dtype=float))


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float

    def covers(self, value: float, nse: float = 3.0) -> bool:
        return abs(self.mean - value) <= nse * self.se


def _stats(x):
    """Mean, its standard error, sample stddev and the stddev's standard error
    (delta method), column-wise."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    mean = x.mean(axis=0)
    dev = x - mean
    var = (dev ** 2).sum(axis=0) / max(m - 1, 1)
    std = np.sqrt(var)
    m4 = (dev ** 4).mean(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        std_se = np.where(std > 0, np.sqrt(np.maximum(m4 - var ** 2, 0.0) / (4.0 * var * m)), 0.0)
    return mean, np.sqrt(var / m), std, std_se


def _streams(cfg: SimConfig, chunk: int):
    sizes = [chunk] * (cfg.paths // chunk)
    if cfg.paths % chunk:
        sizes.append(cfg.paths % chunk)
    return [(i, s, np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(i,))))
            for i, s in enumerate(sizes)]


def _run_streams(cfg, fn, chunk):
    jobs = _streams(cfg, chunk)
    if cfg.workers == 1 or len(jobs) == 1:
        parts = [fn(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(lambda job: fn(*job), jobs))
    return parts


def sample_death_times(mort: MortalityParams, uniforms, horizon: float):
    """Inverse-transform death times for uniform draws in [0, 1); inf beyond ``horizon``."""
    expo = -np.log1p(-np.atleast_2d(np.asarray(uniforms, dtype=float)))
    return MK.death_times(expo, mort.eta, mort.gompertz_scale, mort.b, float(horizon))


@dataclass(frozen=True, eq=False)
class PoolSimulation:
    """Per-checkpoint statistics with the representative agent kept alive."""

    times: np.ndarray
    z: np.ndarray
    z_se: np.ndarray
    z_std: np.ndarray
    z_std_se: np.ndarray
    payout: np.ndarray  # K_t Z_t- for an agent dying at t
    payout_se: np.ndarray
    lone_fraction: np.ndarray  # share of paths with the agent as sole survivor
    paths: int

    def at(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9:
            raise KeyError(t)
        return i


def simulate_pool(cfg: SimConfig, checkpoints) -> PoolSimulation:
    """Simulate with deterministic hazard and record statistics at ``checkpoints``."""
    if cfg.hazard is not None:
        raise InvalidConfigError("use simulate_stochastic_hazard for stochastic hazard runs")
    chk = np.sort(np.atleast_1d(np.asarray(checkpoints, dtype=float)))
    if chk[0] <= 0 or chk[-1] > cfg.T + 1e-12:
        raise InvalidConfigError("checkpoints must lie in (0, T]")
    k_chk = cfg.schedule.at(chk)
    kappa_chk = np.maximum(cfg.kappa_at(chk), k_chk)
    mkt = cfg.mkt

    if cfg.n is None:
        zdet = np.interp(chk, cfg.schedule.times, infinite_pool_z(cfg.schedule, cfg.mort, mkt))

        def run(i, size, rng):
            xi = rng.standard_normal((size, chk.size))
            dt = np.diff(np.concatenate(([0.0], chk)))
            b = np.cumsum(np.sqrt(dt) * xi, axis=1)
            Z = zdet * np.exp(mkt.sigma * b - 0.5 * mkt.sigma ** 2 * chk)
            return Z, k_chk * Z, np.zeros(Z.shape, dtype=bool)
    else:
        n = cfg.n

        def run(i, size, rng):
            u = rng.random((size, n - 1))
            xi = rng.standard_normal((size, chk.size))
            deaths = sample_death_times(cfg.mort, u, chk[-1])
            Z, N, pay = MK.pool_paths(deaths, xi, chk, cfg.schedule.times, cfg.schedule.k,
                                      k_chk, kappa_chk, n, mkt.mu, mkt.sigma)
            return Z, pay, N == 1

    parts = _run_streams(cfg, run, cfg.chunk)
    Z = np.concatenate([p[0] for p in parts])
    pay = np.concatenate([p[1] for p in parts])
    lone = np.concatenate([p[2] for p in parts])
    z, z_se, z_std, z_std_se = _stats(Z)
    pm, pse, _, _ = _stats(pay)
    return PoolSimulation(chk, z, z_se, z_std, z_std_se, pm, pse, lone.mean(axis=0), cfg.paths)


def simulate_conditional_payout(cfg: SimConfig, t_death: float) -> Estimate:
    """E[K_t Z_t- | agent dies at t], with its standard error."""
    if not 0 < t_death < cfg.T:
        raise InvalidConfigError("need 0 < t_death < T")
    sim = simulate_pool(cfg, [t_death])
    return Estimate(float(sim.payout[0]), float(sim.payout_se[0]))


@dataclass(frozen=True)
class SurvivorPayout:
    z: Estimate
    stddev: Estimate


def simulate_survivor_payout(cfg: SimConfig) -> SurvivorPayout:
    """Terminal account value of an agent who survives to T: mean and stddev."""
    sim = simulate_pool(cfg, [cfg.T])
    return SurvivorPayout(Estimate(float(sim.z[0]), float(sim.z_se[0])),
                          Estimate(float(sim.z_std[0]), float(sim.z_std_se[0])))


@dataclass(frozen=True)
class StochasticPayout:
    z: Estimate
    utility: Estimate
    gamma: float


def crra(x, gamma: float):
    x = np.asarray(x, dtype=float)
    if gamma == 1.0:
        return np.log(x)
    return x ** (1.0 - gamma) / (1.0 - gamma)


def simulate_stochastic_hazard(cfg: SimConfig, gamma: float = 2.0) -> StochasticPayout:
    """Terminal payout and CRRA utility for a surviving agent under a capped,
    correlated GBM hazard. The hazard path is discretised with step ``cfg.dt``."""
    hz = cfg.hazard
    if hz is None:
        raise InvalidConfigError("hazard must be a CappedGBMHazard")
    steps = int(round(cfg.T / cfg.dt))
    if steps < 1 or abs(steps * cfg.dt - cfg.T) > 1e-9:
        raise InvalidConfigError("dt must divide T")
    grid_t = np.linspace(0.0, cfg.T, steps + 1)
    k_grid = cfg.schedule.at(grid_t)
    mort, mkt = cfg.mort, cfg.mkt
    lam0 = float(hazard(mort, 0.0))
    n = 0 if cfg.n is None else cfg.n
    chunk = max(256, min(cfg.chunk, 2_000_000 // steps))

    def run(i, size, rng):
        xi_w = rng.standard_normal((size, steps))
        xi_perp = rng.standard_normal((size, steps))
        expo = -np.log1p(-rng.random((size, max(n - 1, 0))))
        return MK.stoch_paths(xi_w, xi_perp, expo, k_grid, cfg.dt, lam0, mort.eta, mort.b,
                              hz.epsilon, hz.rho, hz.lambda_inf, mkt.mu, mkt.sigma, n)

    Z = np.concatenate(_run_streams(cfg, run, chunk))
    zm, zse, _, _ = _stats(Z)
    um, use, _, _ = _stats(crra(Z, gamma))
    return StochasticPayout(Estimate(float(zm), float(zse)), Estimate(float(um), float(use)), gamma)


@dataclass(frozen=True, eq=False)
class PeriodicSimulation:
    times: np.ndarray
    fund: np.ndarray  # E[L_i | agent survives period i]
    fund_se: np.ndarray
    z: np.ndarray
    z_se: np.ndarray
    death_payout: np.ndarray  # payout to an agent dying in period i
    death_payout_se: np.ndarray


def simulate_periodic(spec: DiscreteSpec, k, paths: int = 100_000, seed: int = 0,
                      chunk: int = DEFAULT_CHUNK) -> PeriodicSimulation:
    """Simulate the periodic-payout pool for recovery values ``k`` (one per period)."""
    k = np.asarray(k, dtype=float)
    M, n, delta = spec.periods, spec.n, spec.delta
    if k.shape != (M,):
        raise InvalidConfigError(f"need {M} recovery values, got {k.shape}")
    mu, sigma = spec.mkt.mu, spec.mkt.sigma

    def run(i, size, rng):
        u = rng.random((size, n - 1))
        xi = rng.standard_normal((size, M))
        deaths = sample_death_times(spec.mort, u, spec.T)
        period = np.where(np.isfinite(deaths), np.ceil(deaths / delta), M + 1)
        L = np.full(size, float(n))
        N = np.full(size, n)
        Ls, Zs, pays = [], [], []
        for p in range(1, M + 1):
            growth = np.exp((mu - 0.5 * sigma ** 2) * delta + sigma * math.sqrt(delta) * xi[:, p - 1])
            D = (period == p).sum(axis=1)
            pays.append(k[p - 1] * L * growth / N)
            L = L * (growth - k[p - 1] * D / N)
            N = N - D
            Ls.append(L)
            Zs.append(L / N)
        return np.stack(Ls, 1), np.stack(Zs, 1), np.stack(pays, 1)

    cfg_like = _SeedOnly(paths, seed, 1, chunk)
    parts = _run_streams(cfg_like, run, chunk)
    Lm, Lse, _, _ = _stats(np.concatenate([p[0] for p in parts]))
    Zm, Zse, _, _ = _stats(np.concatenate([p[1] for p in parts]))
    Pm, Pse, _, _ = _stats(np.concatenate([p[2] for p in parts]))
    return PeriodicSimulation(np.arange(1, M + 1) * delta, Lm, Lse, Zm, Zse, Pm, Pse)


@dataclass(frozen=True)
class _SeedOnly:
    paths: int
    seed: int
    workers: int
    chunk: int


def death_event(L: float, N: int, K: float):
    """Settle one death with N survivors beforehand.

    Returns the fund after the payout, and the survivors' account value
    computed both from the fund and from the multiplicative jump rule.
    """
    Z_before = L / N
    L_after = L - K * Z_before
    return L_after, L_after / (N - 1), Z_before * (1.0 + (1.0 - K) / (N - 1))


def reference_path(deaths, normals, checkpoints, schedule: RecoverySchedule, kappa_chk, n: int,
                   mkt: MarketParams):
    """Event-by-event simulation of one path tracking fund L and head count N.

    Slow and explicit; the compiled kernels are tested against it.
    """
    events = sorted([(float(d), 0) for d in deaths if np.isfinite(d)] +
                    [(float(c), 1) for c in checkpoints])
    L, N, t = float(n), n, 0.0
    ci = 0
    Z_out, N_out, pay_out = [], [], []
    for s, kind in events:
        if kind == 0 and s >= checkpoints[-1]:
            break
        if kind == 1:
            dt = s - t
            L *= math.exp((mkt.mu - 0.5 * mkt.sigma ** 2) * dt + mkt.sigma * math.sqrt(dt) * normals[ci])
            t = s
            K = float(schedule.at(s)) if N > 1 else float(kappa_chk[ci])
            Z_out.append(L / N)
            N_out.append(N)
            pay_out.append(K * L / N)
            ci += 1
        else:
            K = float(np.interp(s, schedule.times, schedule.k))
            L, _, _ = death_event(L, N, K)
            N -= 1
    return np.array(Z_out), np.array(N_out), np.array(pay_out)
