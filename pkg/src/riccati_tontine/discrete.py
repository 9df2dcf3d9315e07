"""Periodic-payout tontine.

Deaths within a period are settled together at the period end at rate k_i,
and survivors share the rest at the horizon. Money left when deaths exhaust
the pool is not redistributed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _discrete_kernels as DK
from ._ode_kernels import DEGENERATE, NONFINITE
from .errors import DegenerateDenominatorError, NonFiniteError
from .mortality import MortalityParams, period_survival
from .riccati import MarketParams, RecoverySchedule


@dataclass(frozen=True)
class DiscreteSpec:
    n: int
    periods: int
    T: float = 20.0
    mort: MortalityParams = MortalityParams()
    mkt: MarketParams = MarketParams()

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"pool size must be an integer >= 2, got {self.n}")
        if int(self.periods) != self.periods or self.periods < 1:
            raise ValueError(f"periods must be a positive integer, got {self.periods}")
        if not self.T > 0:
            raise ValueError("horizon must be positive")

    @property
    def delta(self) -> float:
        return self.T / self.periods


@dataclass(frozen=True, eq=False)
class DiscreteResult:
    spec: DiscreteSpec
    times: np.ndarray  # period ends delta, 2 delta, ..., T
    k: np.ndarray
    u: np.ndarray  # shape (periods + 1, n); row i holds u_j(i)

    @property
    def z(self) -> np.ndarray:
        """Expected account value of a surviving agent at each period end."""
        return self.u[1:] @ (1.0 / np.arange(1, self.spec.n + 1))

    def schedule(self) -> RecoverySchedule:
        return RecoverySchedule(self.times, self.k, "discrete",
                                meta={"n": self.spec.n, "periods": self.spec.periods})


def discrete_schedule(spec: DiscreteSpec) -> DiscreteResult:
    i = np.arange(1, spec.periods + 1)
    p = np.asarray(period_survival(spec.mort, i, spec.delta), dtype=float)
    k, u, status, at = DK.discrete_recursion(p, spec.delta, spec.mkt.mu, spec.n)
    if status == DEGENERATE:
        raise DegenerateDenominatorError(f"sum_j u_j/j underflowed in period {at + 1}")
    if status == NONFINITE or not np.all(np.isfinite(u)):
        raise NonFiniteError(f"non-finite recovery in period {at + 1}")
    return DiscreteResult(spec, i * spec.delta, k, u)
