"""Time each compiled kernel against its numpy twin on identical inputs.

    python3 benchmarks/bench_kernels.py [--quick] [--repeat 3]

Numba variants are compiled before timing. Prints one row per kernel with
best-of-N wall times and the speedup.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from riccati_tontine import MarketParams, MortalityParams, OdeGrid, hazard, riccati_schedule_ode
from riccati_tontine import _accel
from riccati_tontine import _discrete_kernels as DK
from riccati_tontine import _mc_kernels as MK
from riccati_tontine import _ode_kernels as K
from riccati_tontine.mortality import period_survival
from riccati_tontine.riccati import on_half_grid


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(quick: bool):
    mort, mkt = MortalityParams(), MarketParams()
    steps = 2000 if quick else 20000
    g = OdeGrid.over(20.0, steps)
    lam = hazard(mort, g.half_times)
    ric = riccati_schedule_ode(mort, mkt, 20.0, g)
    k_half = on_half_grid(ric.times, ric.k, g)
    rng = np.random.default_rng(0)
    paths = 2000 if quick else 20000
    n_pool = 10
    expo = -np.log1p(-rng.random((paths, n_pool - 1)))
    deaths = MK.death_times_numpy(expo, mort.eta, mort.gompertz_scale, mort.b, 20.0)
    chk = np.arange(1.0, 21.0)
    normals = rng.standard_normal((paths, chk.size))
    sp = 200 if quick else 1000
    xi = rng.standard_normal((2, paths // 4, sp))
    p = np.asarray(period_survival(mort, np.arange(1, 21), 1.0))

    def moments(mode, n, with_v):
        return lambda impl: impl(lam, k_half, g.h, n, mkt.mu, mkt.sigma, mode, with_v, steps)

    return {
        "riccati": ((K.riccati_rk4_numba, K.riccati_rk4_numpy), lambda f: f(lam, g.h, mkt.mu)),
        "moments n=10": ((K.moments_rk4_numba, K.moments_rk4_numpy), moments(K.GIVEN, 10, False)),
        "kappa1 n=10": ((K.moments_rk4_numba, K.moments_rk4_numpy), moments(K.KAPPA1, 10, False)),
        "kappak n=10": ((K.moments_rk4_numba, K.moments_rk4_numpy), moments(K.KAPPAK, 10, False)),
        "variance n=1000": ((K.moments_rk4_numba, K.moments_rk4_numpy), moments(K.GIVEN, 1000, True)),
        "discrete n=200": ((DK.discrete_recursion_numba, DK.discrete_recursion_numpy),
                           lambda f: f(p, 1.0, mkt.mu, 200)),
        "death times": ((MK.death_times_numba, MK.death_times_numpy),
                        lambda f: f(expo, mort.eta, mort.gompertz_scale, mort.b, 20.0)),
        "pool paths": ((MK.pool_paths_numba, MK.pool_paths_numpy),
                       lambda f: f(deaths, normals, chk, ric.times, ric.k, ric.at(chk), np.ones(chk.size),
                                   n_pool, mkt.mu, mkt.sigma)),
        "stochastic hazard": ((MK.stoch_paths_numba, MK.stoch_paths_numpy),
                              lambda f: f(xi[0], xi[1], expo[: paths // 4], ric.at(np.linspace(0, 20, sp + 1)),
                                          20.0 / sp, float(hazard(mort, 0.0)), mort.eta, mort.b, 0.15, 0.1,
                                          1.0, mkt.mu, mkt.sigma, n_pool)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="small inputs (smoke test)")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 0
    print(f"{'kernel':<20}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, ((fast, slow), call) in cases(args.quick).items():
        call(fast)  # compile
        tf = best_of(lambda: call(fast), args.repeat)
        ts = best_of(lambda: call(slow), 1 if not args.quick else args.repeat)
        print(f"{name:<20}{tf:>12.4f}{ts:>12.4f}{ts / tf:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
