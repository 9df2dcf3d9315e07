"""Gompertz-Makeham hazard and survival curves.

Parameterised by initial age ``x``, modal age ``m``, dispersion ``b`` and a
constant Makeham term ``eta`` (which also absorbs background lapsation):

    hazard(t)   = eta + exp((x + t - m) / b) / b
    survival(t) = exp(-eta t - exp((x - m) / b) (exp(t / b) - 1))

Time is in years from the pool's inception. All functions accept scalars or
numpy arrays for ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MortalityParams:
    x: float = 65.0
    m: float = 90.0
    b: float = 10.0
    eta: float = 0.02

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if self.eta < 0:
            raise ValueError(f"eta must be non-negative, got {self.eta}")
        if self.x < 0:
            raise ValueError(f"x must be non-negative, got {self.x}")

    @property
    def gompertz_scale(self) -> float:
        """exp((x - m) / b): the Gompertz cumulative-hazard prefactor."""
        return float(np.exp((self.x - self.m) / self.b))


def hazard(params: MortalityParams, t):
    return params.eta + np.exp((params.x + np.asarray(t, dtype=float) - params.m) / params.b) / params.b


def cumulative_hazard(params: MortalityParams, t):
    """Integral of the hazard over [0, t], in closed form."""
    t = np.asarray(t, dtype=float)
    return params.eta * t + params.gompertz_scale * np.expm1(t / params.b)


def survival(params: MortalityParams, t):
    return np.exp(-cumulative_hazard(params, t))


def period_survival(params: MortalityParams, i, delta: float):
    """Probability of surviving the ``i``-th period ``[(i-1)delta, i delta]`` given
    survival to its start. ``i`` counts from 1."""
    i = np.asarray(i, dtype=float)
    start = params.x + (i - 1.0) * delta - params.m
    return np.exp(-params.eta * delta - np.exp(start / params.b) * np.expm1(delta / params.b))
