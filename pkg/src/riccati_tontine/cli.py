"""Command-line front end.

    riccati-tontine schedule  --mu 0.07 --out k.csv
    riccati-tontine bracket   --n 10
    riccati-tontine variance  --n 10 --sigma 0.2
    riccati-tontine discrete  --n 20 --periods 20
    riccati-tontine stochmort --epsilon 0.15 --rho 0.109 --gamma 2
    riccati-tontine simulate  --n 10 --paths 100000 --seed 42
    riccati-tontine reproduce --target table2

Exit status: 0 success, 1 invalid configuration, 2 golden-value mismatch,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, golden
from . import pool as P
from . import simulate as S
from . import stochmort as SM
from .discrete import DiscreteSpec, discrete_schedule
from .errors import HazardCapError, InvalidConfigError, InvalidGammaError, OutOfRangeError, TontineError
from .mortality import MortalityParams
from .numerics import OdeGrid
from .riccati import (MarketParams, RecoverySchedule, infinite_pool_stddev, infinite_pool_z,
                      riccati_schedule_closed_form, riccati_schedule_ode)

EXIT_OK, EXIT_CONFIG, EXIT_GOLDEN, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("schedule", "bracket", "variance", "discrete", "stochmort", "simulate", "reproduce")
# precondition violations reported with exit status 1; other library errors map to 3
CONFIG_ERRORS = (InvalidConfigError, HazardCapError, InvalidGammaError, OutOfRangeError)
TARGETS = ("table1", "table2", "table3", "fig1", "fig2", "fig3")


@dataclass
class TontineSpec:
    T: float = 20.0
    n: int | None = None  # None: infinite pool
    payout: str = "continuous"  # or "periodic"
    kappa: str = "one"


@dataclass
class RunConfig:
    command: str
    mort: MortalityParams
    mkt: MarketParams
    tontine: TontineSpec
    steps: int
    out: str | None = None
    fmt: str = "csv"
    extra: dict = field(default_factory=dict)

    @property
    def grid(self) -> OdeGrid:
        return OdeGrid.over(self.tontine.T, self.steps)

    def params(self) -> dict:
        d = {**asdict(self.mort), **asdict(self.mkt), "T": self.tontine.T}
        if self.tontine.n is not None or self.command in ("bracket", "variance", "simulate", "discrete"):
            d["n"] = "inf" if self.tontine.n is None else self.tontine.n
        d.update(self.extra)
        return d


@dataclass
class Dataset:
    columns: dict
    meta: dict
    checks: list = field(default_factory=list)  # (label, deviation, tolerance)

    @property
    def passed(self) -> bool:
        return all(dev <= tol for _, dev, tol in self.checks)


# --- formatting ----------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.9g}"


def to_csv(columns: dict) -> str:
    names = list(columns)
    rows = zip(*(columns[c] for c in names))
    lines = [",".join(names)] + [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _jsonable(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def to_json(cfg: RunConfig, ds: Dataset) -> str:
    doc = {
        "params": _jsonable(cfg.params()),
        "columns": {k: _jsonable(v) for k, v in ds.columns.items()},
        "meta": {**{k: _jsonable(v) for k, v in ds.meta.items()},
                 "steps": cfg.steps, "version": __version__},
    }
    return json.dumps(doc, indent=1) + "\n"


def _emit(cfg: RunConfig, ds: Dataset):
    text = to_json(cfg, ds) if cfg.fmt == "json" else to_csv(ds.columns)
    if cfg.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# --- commands ------------------------------------------------------------------

def _sample(grid: OdeGrid, every: float) -> np.ndarray:
    stride = int(round(every / grid.h))
    if stride < 1 or abs(stride * grid.h - every) > 1e-9 or grid.steps % stride:
        raise InvalidConfigError(f"--every {every} must be a multiple of the step {grid.h} dividing T")
    return np.arange(0, grid.steps + 1, stride)


def cmd_schedule(cfg: RunConfig) -> Dataset:
    g = cfg.grid
    ode = riccati_schedule_ode(cfg.mort, cfg.mkt, g.t1, g)
    closed = riccati_schedule_closed_form(cfg.mort, cfg.mkt, g.t1, g)
    z = infinite_pool_z(ode, cfg.mort, cfg.mkt)
    idx = _sample(g, cfg.extra["every"])
    return Dataset({"t": g.times[idx], "k": ode.k[idx], "k_closed_form": closed.k[idx], "z": z[idx]},
                   {"method": ode.method})


def cmd_bracket(cfg: RunConfig) -> Dataset:
    n = cfg.tontine.n
    if n is None:
        raise InvalidConfigError("bracket needs a finite --n >= 2")
    g = cfg.grid
    T = g.t1
    ric = riccati_schedule_ode(cfg.mort, cfg.mkt, T, g)
    lo, mlo = P.extremal_kappa1_schedule(n, cfg.mort, cfg.mkt, T, g)
    hi, mhi = P.extremal_kappak_schedule(n, cfg.mort, cfg.mkt, T, g)
    mric = P.propagate_moments(n, ric, cfg.mort, cfg.mkt, g)
    kappa = P.riccati_extremal_kappa(n, cfg.mort, cfg.mkt, T, g)
    idx = _sample(g, cfg.extra["every"])
    cols = {
        "t": g.times[idx],
        "k_kappa1": lo.k[idx], "k_riccati": ric.k[idx], "k_kappak": hi.k[idx],
        "z_kappa1": mlo.z[idx], "z_riccati": mric.z[idx], "z_kappak": mhi.z[idx],
        "kappa_riccati": kappa[idx],
    }
    return Dataset(cols, {"method": "bracket"})


def cmd_variance(cfg: RunConfig) -> Dataset:
    g = cfg.grid
    ric = riccati_schedule_ode(cfg.mort, cfg.mkt, g.t1, g)
    idx = _sample(g, cfg.extra["every"])
    t = g.times[idx]
    if cfg.tontine.n is None:
        z = infinite_pool_z(ric, cfg.mort, cfg.mkt)[idx]
        sd = z * np.sqrt(np.expm1(cfg.mkt.sigma ** 2 * t))
    else:
        res = P.propagate_variance(cfg.tontine.n, ric, cfg.mort, cfg.mkt, g, stride=1)
        z, sd = res.moments.z[idx], res.stddev_curve[idx]
    return Dataset({"t": t, "z": z, "stddev": sd}, {"method": ric.method})


def cmd_discrete(cfg: RunConfig) -> Dataset:
    n = cfg.tontine.n
    if n is None:
        raise InvalidConfigError("discrete needs a finite --n >= 2")
    spec = DiscreteSpec(n, cfg.extra["periods"], cfg.tontine.T, cfg.mort, cfg.mkt)
    res = discrete_schedule(spec)
    cont = riccati_schedule_ode(cfg.mort, cfg.mkt, cfg.tontine.T, cfg.grid)
    return Dataset({"t": res.times, "k": res.k, "k_continuous": cont.at(res.times), "z": res.z},
                   {"method": "discrete", "periods": spec.periods})


def _stoch_params(cfg):
    x = cfg.extra
    return SM.StochMortParams(x["epsilon"], x["rho"], x["lambda_inf"], x["gamma"])


def cmd_stochmort(cfg: RunConfig) -> Dataset:
    g = cfg.grid
    sm = _stoch_params(cfg)
    log_bar = SM.log_utility_bar(cfg.mort, cfg.mkt, g.t1, g)
    gamma0 = SM.critical_gamma(cfg.mort, cfg.mkt, g.t1, g)
    meta = {"method": "first-order", "gamma0": gamma0, "log_utility_bar": log_bar}
    if sm.gamma == 1.0:
        ex = SM.expand(cfg.mort, cfg.mkt, SM.StochMortParams(sm.epsilon, sm.rho, sm.lambda_inf, 2.0), g.t1, g)
    else:
        ex = SM.expand(cfg.mort, cfg.mkt, sm, g.t1, g)
        meta.update(theta0=ex.theta0, thetabar=ex.thetabar)
    meta["zbar_T"] = ex.zbar_T
    idx = _sample(g, cfg.extra["every"])
    cols = {
        "t": g.times[idx], "k0": ex.k0[idx], "z0": ex.z0[idx], "zbar": ex.zbar[idx],
        "k": ex.k(sm.epsilon, sm.rho)[idx], "z": ex.z(sm.epsilon, sm.rho)[idx],
    }
    return Dataset(cols, meta)


def cmd_simulate(cfg: RunConfig) -> Dataset:
    g = cfg.grid
    T = g.t1
    x = cfg.extra
    n = cfg.tontine.n
    meta = {"seed": x["seed"], "paths": x["paths"], "kappa": cfg.tontine.kappa}
    if x["epsilon"] > 0:
        sm = _stoch_params(cfg)
        ex = SM.expand(cfg.mort, cfg.mkt, SM.StochMortParams(sm.epsilon, sm.rho, sm.lambda_inf, 2.0), T, g)
        sched = RecoverySchedule(ex.times, np.clip(ex.k(sm.epsilon, sm.rho), 0.0, 1.0), "riccati-ode")
        sim_cfg = S.SimConfig(n, T, sched, cfg.mort, cfg.mkt, paths=x["paths"], seed=x["seed"],
                              dt=x["dt"], hazard=S.CappedGBMHazard(sm.epsilon, sm.rho, sm.lambda_inf),
                              workers=x["workers"])
        res = S.simulate_stochastic_hazard(sim_cfg, sm.gamma)
        meta.update(method="stochastic-hazard", gamma=sm.gamma, dt=x["dt"])
        cols = {"t": [T], "z_mc": [res.z.mean], "z_se": [res.z.se], "utility_mc": [res.utility.mean],
                "utility_se": [res.utility.se], "z_first_order": [ex.z(sm.epsilon, sm.rho)[-1]]}
        return Dataset(cols, meta)

    ric = riccati_schedule_ode(cfg.mort, cfg.mkt, T, g)
    sim_cfg = S.SimConfig(n, T, ric, cfg.mort, cfg.mkt, paths=x["paths"], seed=x["seed"],
                          kappa_policy=cfg.tontine.kappa, workers=x["workers"])
    idx = _sample(g, x["every"])[1:]
    t = g.times[idx]
    sim = S.simulate_pool(sim_cfg, t)
    if n is None:
        z_ode = infinite_pool_z(ric, cfg.mort, cfg.mkt)[idx]
        pay_ode = ric.k[idx] * z_ode
    else:
        mom = P.propagate_moments(n, ric, cfg.mort, cfg.mkt, g)
        kap = 1.0 if cfg.tontine.kappa == "one" else mom.k
        z_ode = mom.z[idx]
        pay_ode = mom.death_payout(kap)[idx]
    meta["method"] = ric.method
    cols = {"t": t, "k": ric.k[idx], "z_mc": sim.z, "z_se": sim.z_se, "z_ode": z_ode,
            "stddev_mc": sim.z_std, "stddev_se": sim.z_std_se,
            "payout_mc": sim.payout, "payout_se": sim.payout_se, "payout_ode": pay_ode}
    return Dataset(cols, meta)


# --- reproduce -------------------------------------------------------------------

def _reference_defaults(cfg: RunConfig) -> RunConfig:
    return RunConfig(cfg.command, MortalityParams(65, 90, 10, 0.02), MarketParams(0.07, 0.2),
                     TontineSpec(T=20.0), cfg.steps, cfg.out, cfg.fmt, dict(cfg.extra))


def reproduce_table1(cfg: RunConfig) -> Dataset:
    g = cfg.grid
    ric = riccati_schedule_ode(cfg.mort, cfg.mkt, 20.0, g)
    t = np.arange(1, 21, dtype=float)
    k = np.array([ric.value_at_node(s) for s in t])
    published = np.array([golden.TABLE1[int(s)] for s in t])
    dev = np.abs(k - published)
    return Dataset({"t": t, "k": k, "published": published, "abs_dev": dev}, {"method": ric.method},
                   [("table1", float(dev.max()), golden.TOL_TABLE1)])


def table2_rows(mort, mkt, grid):
    """(n, [(k20, z20) per design]) for every pool size in the table."""
    T = grid.t1
    ric = riccati_schedule_ode(mort, mkt, T, grid)
    rows = []
    for n in golden.TABLE2:
        if math.isinf(n):
            zinf = infinite_pool_z(ric, mort, mkt)[-1]
            rows.append((n, [(ric.k[-1], zinf)] * 3))
            continue
        lo, mlo = P.extremal_kappa1_schedule(n, mort, mkt, T, grid)
        mid = P.propagate_moments(n, ric, mort, mkt, grid)
        hi, mhi = P.extremal_kappak_schedule(n, mort, mkt, T, grid)
        rows.append((n, [(lo.k[-1], mlo.zT), (ric.k[-1], mid.zT), (hi.k[-1], mhi.zT)]))
    return rows


def reproduce_table2(cfg: RunConfig) -> Dataset:
    rows = table2_rows(cfg.mort, cfg.mkt, cfg.grid)
    cols = {"n": []}
    for d in golden.DESIGNS:
        cols[f"k20_{d}"] = []
        cols[f"z20_{d}"] = []
    cols["max_abs_dev"] = []
    worst = 0.0
    for n, vals in rows:
        cols["n"].append("inf" if math.isinf(n) else str(n))
        dev = 0.0
        for d, (k, z), (pk, pz) in zip(golden.DESIGNS, vals, golden.TABLE2[n]):
            cols[f"k20_{d}"].append(k)
            cols[f"z20_{d}"].append(z)
            dev = max(dev, abs(k - pk), abs(z - pz))
        cols["max_abs_dev"].append(dev)
        worst = max(worst, dev)
    return Dataset(cols, {"method": "table2"}, [("table2", worst, golden.TOL_TABLE2_STRICT)])


def table3_rows(mort, mkt, grid):
    T = grid.t1
    ric = riccati_schedule_ode(mort, mkt, T, grid)
    out = []
    for n in golden.TABLE3:
        if math.isinf(n):
            out.append((n, infinite_pool_stddev(infinite_pool_z(ric, mort, mkt)[-1], mkt, T)))
        else:
            out.append((n, P.propagate_variance(n, ric, mort, mkt, grid).stddev))
    return out


def reproduce_table3(cfg: RunConfig) -> Dataset:
    rows = table3_rows(cfg.mort, cfg.mkt, cfg.grid)
    ns = ["inf" if math.isinf(n) else str(n) for n, _ in rows]
    sd = np.array([s for _, s in rows])
    published = np.array([golden.TABLE3[n] for n, _ in rows])
    dev = np.abs(sd - published)
    return Dataset({"n": ns, "stddev": sd, "published": published, "abs_dev": dev}, {"method": "table3"},
                   [("table3", float(dev.max()), golden.TOL_TABLE3)])


def reproduce_fig1(cfg: RunConfig) -> Dataset:
    g = cfg.grid
    low = riccati_schedule_ode(cfg.mort, MarketParams(0.02, cfg.mkt.sigma), 20.0, g)
    high = riccati_schedule_ode(cfg.mort, MarketParams(0.07, cfg.mkt.sigma), 20.0, g)
    idx = _sample(g, cfg.extra["every"])
    t = g.times[idx]
    dev_t1 = max(abs(high.value_at_node(s) - v) for s, v in golden.TABLE1.items())
    checks = [("fig1 k0", max(abs(low.k[0] - 1.0), abs(high.k[0] - 1.0)), 0.0),
              ("fig1 right vs table1", dev_t1, golden.TOL_TABLE1)]
    return Dataset({"t": t, "k_mu2": low.k[idx], "k_mu7": high.k[idx]}, {"method": low.method}, checks)


def reproduce_fig2(cfg: RunConfig) -> Dataset:
    g = cfg.grid
    ric = riccati_schedule_ode(cfg.mort, cfg.mkt, 20.0, g)
    idx = _sample(g, cfg.extra["every"])
    cols = {"t": g.times[idx], "k_riccati": ric.k[idx]}
    checks = []
    for n in (3, 10):
        lo, _ = P.extremal_kappa1_schedule(n, cfg.mort, cfg.mkt, 20.0, g)
        hi, _ = P.extremal_kappak_schedule(n, cfg.mort, cfg.mkt, 20.0, g)
        cols[f"k_kappa1_n{n}"] = lo.k[idx]
        cols[f"k_kappak_n{n}"] = hi.k[idx]
        order = max(float(np.max(lo.k - ric.k)), float(np.max(ric.k - hi.k)), 0.0)
        checks.append((f"fig2 n={n} bracketing", order, 1e-12))
        (pk_lo, _), _, (pk_hi, _) = golden.TABLE2[n]
        checks.append((f"fig2 n={n} k20", max(abs(lo.k[-1] - pk_lo), abs(hi.k[-1] - pk_hi)), golden.TOL_TABLE2))
    return Dataset(cols, {"method": "bracket"}, checks)


def reproduce_fig3(cfg: RunConfig) -> Dataset:
    spec = DiscreteSpec(20, 20, 20.0, cfg.mort, cfg.mkt)
    res = discrete_schedule(spec)
    cont = riccati_schedule_ode(cfg.mort, cfg.mkt, 20.0, cfg.grid)
    kc = np.array([cont.value_at_node(s) for s in res.times])
    checks = [
        ("fig3 discrete k1", abs(res.k[0] - math.exp(-cfg.mkt.mu * spec.delta)), golden.TOL_DISCRETE_K1),
        ("fig3 discrete k1 quoted", abs(res.k[0] - golden.DISCRETE_K1), golden.TOL_QUOTED_4DP),
        ("fig3 discrete k20", abs(res.k[-1] - golden.DISCRETE_K20), golden.TOL_DISCRETE_K20),
        ("fig3 continuous k1", abs(kc[0] - golden.CONTINUOUS_K1), golden.TOL_QUOTED_4DP),
        ("fig3 continuous k20", abs(kc[-1] - golden.CONTINUOUS_K20), golden.TOL_QUOTED_4DP),
    ]
    return Dataset({"t": res.times, "k_discrete": res.k, "k_continuous": kc}, {"method": "discrete"}, checks)


REPRODUCERS = {
    "table1": reproduce_table1, "table2": reproduce_table2, "table3": reproduce_table3,
    "fig1": reproduce_fig1, "fig2": reproduce_fig2, "fig3": reproduce_fig3,
}


def cmd_reproduce(cfg: RunConfig) -> Dataset:
    target = cfg.extra["target"]
    if target not in REPRODUCERS:
        raise InvalidConfigError(f"--target must be one of {', '.join(TARGETS)}")
    ds = REPRODUCERS[target](_reference_defaults(cfg))
    for label, dev, tol in ds.checks:
        status = "PASS" if dev <= tol else "FAIL"
        print(f"{label}: max abs deviation {dev:.3g} (tol {tol:.3g}) {status}", file=sys.stderr)
    ds.meta["target"] = target
    ds.meta["passed"] = ds.passed
    return ds


DISPATCH = {
    "schedule": cmd_schedule, "bracket": cmd_bracket, "variance": cmd_variance,
    "discrete": cmd_discrete, "stochmort": cmd_stochmort, "simulate": cmd_simulate,
    "reproduce": cmd_reproduce,
}


# --- argument handling ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _pool_size(text: str):
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"pool size must be an integer or 'inf', got {text!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--x", type=float, default=65.0, help="initial age")
    g.add_argument("--m", type=float, default=90.0, help="Gompertz modal age")
    g.add_argument("--b", type=float, default=10.0, help="Gompertz dispersion")
    g.add_argument("--eta", type=float, default=0.02, help="Makeham (lapse) hazard")
    g.add_argument("--mu", type=float, default=0.07, help="fund drift")
    g.add_argument("--sigma", type=float, default=0.2, help="fund volatility")
    g.add_argument("--T", type=float, default=20.0, help="horizon in years")
    g.add_argument("--n", type=_pool_size, default=None, help="pool size, or 'inf'")
    g.add_argument("--steps", type=int, default=None, help="RK4 steps (default 1000 per year)")
    g.add_argument("--periods", type=int, default=20, help="payout periods (discrete)")
    g.add_argument("--kappa", choices=("one", "k"), default="one", help="lone-survivor rule (simulate)")
    s = common.add_argument_group("stochastic mortality")
    s.add_argument("--epsilon", type=float, default=0.15, help="hazard volatility (0 = deterministic)")
    s.add_argument("--rho", type=float, default=0.109, help="hazard/fund correlation")
    s.add_argument("--gamma", type=float, default=2.0, help="CRRA risk aversion")
    s.add_argument("--lambda-inf", dest="lambda_inf", type=float, default=1.0, help="hazard cap")
    m = common.add_argument_group("Monte Carlo")
    m.add_argument("--paths", type=int, default=100_000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--dt", type=float, default=0.01, help="hazard step for stochastic runs")
    m.add_argument("--workers", type=int, default=1)
    o = common.add_argument_group("output")
    o.add_argument("--out", default=None, help="output file (default stdout)")
    o.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    o.add_argument("--every", type=float, default=None, help="output spacing in years")
    o.add_argument("--target", default=None, help=f"reproduce target: {', '.join(TARGETS)}")

    COMMAND_HELP = {
        "schedule": "infinite-pool Riccati schedule k_t and fund z_t",
        "bracket": "finite-pool schedules under the two extremal lone-survivor rules",
        "variance": "Var(Z_t) for a given pool size",
        "discrete": "periodic-payout schedule for a finite pool",
        "stochmort": "first-order stochastic mortality terms and gamma_0",
        "simulate": "Monte Carlo paths of the fund and payouts",
        "reproduce": "regenerate a reference table or figure and check it",
    }
    parser = _Parser(prog="riccati-tontine", description="Riccati tontine recovery schedules.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=COMMAND_HELP[name])
    return parser


def make_config(ns: argparse.Namespace) -> RunConfig:
    try:
        mort = MortalityParams(ns.x, ns.m, ns.b, ns.eta)
        mkt = MarketParams(ns.mu, ns.sigma)
    except ValueError as exc:
        raise InvalidConfigError(str(exc)) from exc
    if not ns.T > 0:
        raise InvalidConfigError("--T must be positive")
    n = ns.n
    if n is not None and n < 2:
        raise InvalidConfigError("--n must be >= 2 or 'inf'")
    cmd = ns.command
    if n is None:  # per-command default
        n = {"bracket": 10, "discrete": 20, "simulate": 10 if ns.epsilon == 0 else math.inf}.get(cmd, math.inf)
    n = None if math.isinf(n) else n
    steps = ns.steps if ns.steps is not None else int(round(1000 * (20.0 if cmd == "reproduce" else ns.T)))
    if steps < 1:
        raise InvalidConfigError("--steps must be positive")
    if ns.paths < 1 or ns.workers < 1:
        raise InvalidConfigError("--paths and --workers must be positive")
    if not 0 <= ns.seed < 2 ** 64:
        raise InvalidConfigError("--seed must be a 64-bit unsigned integer")
    if ns.periods < 1:
        raise InvalidConfigError("--periods must be positive")
    if abs(ns.rho) > 1 or ns.epsilon < 0:
        raise InvalidConfigError("need |rho| <= 1 and epsilon >= 0")
    if cmd == "reproduce" and ns.target is None:
        raise InvalidConfigError("reproduce needs --target")
    every = ns.every if ns.every is not None else (1.0 if cmd == "simulate" else 0.1)
    extra = {
        "every": every, "periods": ns.periods, "epsilon": ns.epsilon, "rho": ns.rho, "gamma": ns.gamma,
        "lambda_inf": ns.lambda_inf, "paths": ns.paths, "seed": ns.seed, "dt": ns.dt, "workers": ns.workers,
        "target": ns.target,
    }
    return RunConfig(cmd, mort, mkt, TontineSpec(T=ns.T, n=n, kappa=ns.kappa), steps, ns.out, ns.fmt, extra)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = make_config(ns)
        ds = DISPATCH[cfg.command](cfg)
        _emit(cfg, ds)
    except Exception as exc:
        config = isinstance(exc, CONFIG_ERRORS) or (isinstance(exc, ValueError) and not isinstance(exc, TontineError))
        if not config and not isinstance(exc, (TontineError, ArithmeticError)):
            raise
        kind = "invalid configuration" if config else "numerical failure"
        print(f"riccati-tontine: {kind}: {exc}", file=sys.stderr)
        return EXIT_CONFIG if config else EXIT_NUMERIC
    if cfg.command == "reproduce" and not ds.passed:
        return EXIT_GOLDEN
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
