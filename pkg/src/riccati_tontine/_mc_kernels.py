"""Monte Carlo path kernels.

Random inputs are drawn outside the kernels (per stream, fixed shapes), so
the numba and numpy variants consume identical numbers and agree to
rounding.
"""
import math

import numpy as np

from ._accel import njit, pick

BISECT_ITERS = 48  # horizon 2^-48 * 100y < 1e-12


# --- death times by inverse transform ----------------------------------------

@njit(nogil=True)
def death_times_numba(expo, eta, scale, b, horizon):
    """Solve eta s + scale (e^{s/b} - 1) = expo for s, or inf past the horizon."""
    rows, cols = expo.shape
    out = np.empty((rows, cols))
    h_end = eta * horizon + scale * math.expm1(horizon / b)
    for r in range(rows):
        for c in range(cols):
            e = expo[r, c]
            if e >= h_end:
                out[r, c] = np.inf
                continue
            lo = 0.0
            hi = horizon
            for _ in range(BISECT_ITERS):
                mid = 0.5 * (lo + hi)
                if eta * mid + scale * math.expm1(mid / b) < e:
                    lo = mid
                else:
                    hi = mid
            out[r, c] = 0.5 * (lo + hi)
    return out


def death_times_numpy(expo, eta, scale, b, horizon):
    h_end = eta * horizon + scale * math.expm1(horizon / b)
    lo = np.zeros_like(expo)
    hi = np.full_like(expo, horizon)
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        below = eta * mid + scale * np.expm1(mid / b) < expo
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.where(expo >= h_end, np.inf, 0.5 * (lo + hi))


# --- finite pool with deterministic hazard -----------------------------------

@njit(nogil=True)
def pool_paths_numba(deaths, normals, checkpoints, sched_t, sched_k, k_chk, kappa_chk, n, mu, sigma):
    """Agent alive throughout; record Z, N and death payout K Z at checkpoints."""
    P = deaths.shape[0]
    C = checkpoints.shape[0]
    Z = np.empty((P, C))
    N = np.empty((P, C), dtype=np.int64)
    pay = np.empty((P, C))
    drift = mu - 0.5 * sigma * sigma
    for p in range(P):
        d = np.sort(deaths[p])
        alive = n
        jump = 1.0
        e = 0
        logg = 0.0
        tprev = 0.0
        for c in range(C):
            tc = checkpoints[c]
            while e < n - 1 and d[e] < tc:
                ks = np.interp(d[e], sched_t, sched_k)
                jump *= 1.0 + (1.0 - ks) / (alive - 1)
                alive -= 1
                e += 1
            dt = tc - tprev
            logg += drift * dt + sigma * math.sqrt(dt) * normals[p, c]
            tprev = tc
            zc = math.exp(logg) * jump
            Z[p, c] = zc
            N[p, c] = alive
            pay[p, c] = (k_chk[c] if alive > 1 else kappa_chk[c]) * zc
    return Z, N, pay


def pool_paths_numpy(deaths, normals, checkpoints, sched_t, sched_k, k_chk, kappa_chk, n, mu, sigma):
    P = deaths.shape[0]
    d = np.sort(deaths, axis=1)
    alive_before = n - np.arange(n - 1)
    finite = np.isfinite(d)
    ks = np.interp(np.where(finite, d, 0.0), sched_t, sched_k)
    factor = np.where(finite, 1.0 + (1.0 - ks) / (alive_before - 1), 1.0)
    jumps = np.concatenate((np.ones((P, 1)), np.cumprod(factor, axis=1)), axis=1)
    count = (d[:, :, None] < checkpoints[None, None, :]).sum(axis=1)
    J = np.take_along_axis(jumps, count, axis=1)
    dt = np.diff(np.concatenate(([0.0], checkpoints)))
    logg = np.cumsum((mu - 0.5 * sigma * sigma) * dt + sigma * np.sqrt(dt) * normals, axis=1)
    Z = np.exp(logg) * J
    N = n - count
    pay = np.where(N > 1, k_chk, kappa_chk) * Z
    return Z, N.astype(np.int64), pay


# --- stochastic hazard -------------------------------------------------------

@njit(nogil=True)
def stoch_paths_numba(xi_w, xi_perp, expo, k_grid, dt, lam0, eta, b, eps, rho, lam_inf, mu, sigma, n):
    """Terminal Z under a capped GBM hazard correlated with the fund.

    ``n <= 0`` selects the infinite pool (continuous mortality credits);
    otherwise the n-1 other members die when the common cumulative hazard
    crosses their exponential clocks ``expo``.
    """
    P, S = xi_w.shape
    T = S * dt
    out = np.empty(P)
    sq = math.sqrt(dt)
    rc = math.sqrt(max(0.0, 1.0 - rho * rho))
    haz = np.empty(S + 1)
    cum = np.empty(S + 1)
    for p in range(P):
        logx = math.log(lam0 - eta)
        lam = lam0
        frozen = lam >= lam_inf
        if frozen:
            lam = lam_inf
        haz[0] = lam
        cum[0] = 0.0
        bT = 0.0
        credit = 0.0
        for s in range(S):
            bT += (rho * xi_w[p, s] + rc * xi_perp[p, s]) * sq
            if not frozen:
                logx += dt / b + eps * sq * xi_w[p, s]
                lam = eta + math.exp(logx)
                if lam >= lam_inf:
                    lam = lam_inf
                    frozen = True
            haz[s + 1] = lam
            cum[s + 1] = cum[s] + 0.5 * dt * (haz[s] + haz[s + 1])
            credit += 0.5 * dt * ((1.0 - k_grid[s]) * haz[s] + (1.0 - k_grid[s + 1]) * haz[s + 1])
        base = (mu - 0.5 * sigma * sigma) * T + sigma * bT
        if n <= 0:
            out[p] = math.exp(base + credit)
            continue
        d = np.sort(expo[p])
        jump = 1.0
        alive = n
        s = 0
        for e in range(n - 1):
            target = d[e]
            if target >= cum[S]:
                break
            while cum[s + 1] <= target:
                s += 1
            frac = (target - cum[s]) / (cum[s + 1] - cum[s])
            kd = k_grid[s] + frac * (k_grid[s + 1] - k_grid[s])
            jump *= 1.0 + (1.0 - kd) / (alive - 1)
            alive -= 1
        out[p] = math.exp(base) * jump
    return out


def stoch_paths_numpy(xi_w, xi_perp, expo, k_grid, dt, lam0, eta, b, eps, rho, lam_inf, mu, sigma, n):
    P, S = xi_w.shape
    T = S * dt
    sq = math.sqrt(dt)
    rc = math.sqrt(max(0.0, 1.0 - rho * rho))
    bT = np.zeros(P)
    logx = np.full(P, math.log(lam0 - eta))
    lam = np.full(P, min(lam0, lam_inf))
    frozen = np.full(P, lam0 >= lam_inf)
    haz = np.empty((P, S + 1))
    haz[:, 0] = lam
    for s in range(S):
        bT += (rho * xi_w[:, s] + rc * xi_perp[:, s]) * sq
        logx = np.where(frozen, logx, logx + dt / b + eps * sq * xi_w[:, s])
        cand = eta + np.exp(logx)
        hit = ~frozen & (cand >= lam_inf)
        lam = np.where(frozen | hit, lam_inf, cand)
        frozen = frozen | hit
        haz[:, s + 1] = lam
    base = (mu - 0.5 * sigma * sigma) * T + sigma * bT
    if n <= 0:
        w = (1.0 - k_grid) * haz
        credit = np.sum(0.5 * dt * (w[:, :-1] + w[:, 1:]), axis=1)
        return np.exp(base + credit)
    cum = np.concatenate((np.zeros((P, 1)), np.cumsum(0.5 * dt * (haz[:, :-1] + haz[:, 1:]), axis=1)), axis=1)
    d = np.sort(expo, axis=1)
    # row-offset trick: one searchsorted over all paths
    span = cum[:, -1].max() + 1.0
    offs = np.arange(P)[:, None] * span
    flat = (cum + offs).ravel()
    idx = np.searchsorted(flat, (d + offs).ravel(), side="right").reshape(d.shape) - 1
    idx -= np.arange(P)[:, None] * (S + 1)
    inside = d < cum[:, -1:]
    idx = np.clip(idx, 0, S - 1)
    c0 = np.take_along_axis(cum, idx, axis=1)
    c1 = np.take_along_axis(cum, idx + 1, axis=1)
    frac = (d - c0) / (c1 - c0)
    kd = k_grid[idx] + frac * (k_grid[idx + 1] - k_grid[idx])
    alive_before = n - np.arange(n - 1)
    factor = np.where(inside, 1.0 + (1.0 - kd) / (alive_before - 1), 1.0)
    return np.exp(base) * np.prod(factor, axis=1)


death_times = pick(death_times_numba, death_times_numpy)
pool_paths = pick(pool_paths_numba, pool_paths_numpy)
stoch_paths = pick(stoch_paths_numba, stoch_paths_numpy)
