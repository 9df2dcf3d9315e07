"""Deterministic numerical building blocks.

Fixed-step classical RK4, composite Simpson quadrature, bisection and
log-space negative binomial weights. The specialised ODE systems of the
pool module have compiled kernels in :mod:`riccati_tontine._ode_kernels`;
:func:`integrate_ode` is the general-purpose path used for small systems.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import NoBracketError, NonFiniteError

STEPS_PER_YEAR = 1000


@dataclass(frozen=True)
class OdeGrid:
    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError(f"grid needs t1 > t0, got [{self.t0}, {self.t1}]")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")

    @classmethod
    def over(cls, T: float, steps: int | None = None) -> "OdeGrid":
        """Grid on [0, T]; default resolution is h = 0.001 years."""
        if steps is None:
            steps = max(1, int(round(STEPS_PER_YEAR * T)))
        return cls(0.0, float(T), int(steps))

    @property
    def h(self) -> float:
        return (self.t1 - self.t0) / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.steps + 1)

    @property
    def half_times(self) -> np.ndarray:
        """Nodes and midpoints interleaved: 2*steps + 1 points."""
        return np.linspace(self.t0, self.t1, 2 * self.steps + 1)

    def refined(self, factor: int = 2) -> "OdeGrid":
        return OdeGrid(self.t0, self.t1, self.steps * factor)

    def index_of(self, t: float) -> int:
        """Index of the grid node at time ``t`` (must lie on the grid)."""
        pos = (t - self.t0) / self.h
        i = int(round(pos))
        if abs(pos - i) > 1e-6 or not 0 <= i <= self.steps:
            raise ValueError(f"time {t} is not a node of {self}")
        return i


def _check_finite(y, t):
    if not np.all(np.isfinite(y)):
        raise NonFiniteError(f"non-finite state at t={t:.6g}")


def integrate_ode(rhs: Callable, y0, grid: OdeGrid) -> np.ndarray:
    """Classical RK4 on a uniform grid.

    Returns an array of shape ``(steps + 1, dim)`` (or ``(steps + 1,)`` for a
    scalar initial state) with the state at every grid node.
    """
    scalar = np.ndim(y0) == 0
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    _check_finite(y, grid.t0)
    h = grid.h
    out = np.empty((grid.steps + 1, y.size))
    out[0] = y
    t = grid.t0
    for i in range(grid.steps):
        t = grid.t0 + i * h
        k1 = np.asarray(rhs(t, y), dtype=float)
        k2 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k1), dtype=float)
        k3 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k2), dtype=float)
        k4 = np.asarray(rhs(t + h, y + h * k3), dtype=float)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_finite(y, t + h)
        out[i + 1] = y
    return out[:, 0] if scalar else out


def quadrature(f: Callable, a: float, b: float, steps: int = 1000) -> float:
    """Composite Simpson's rule with ``steps`` panels (rounded up to even)."""
    if steps % 2:
        steps += 1
    x = np.linspace(a, b, steps + 1)
    y = np.asarray(f(x), dtype=float)
    if y.ndim == 0:
        y = np.full_like(x, float(y))
    _check_finite(y, a)
    w = np.ones(steps + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((b - a) / (3.0 * steps) * np.dot(w, y))


def cumulative_simpson(half_values, h: float) -> np.ndarray:
    """Running integral at grid nodes from integrand values on the half grid.

    ``half_values`` holds f at t0, t0+h/2, t0+h, ...; each panel [t_i, t_{i+1}]
    is integrated with Simpson's rule using its midpoint.
    """
    f = np.asarray(half_values, dtype=float)
    panels = (h / 6.0) * (f[0:-1:2] + 4.0 * f[1::2] + f[2::2])
    return np.concatenate(([0.0], np.cumsum(panels)))


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
    """Bisection; returns the midpoint of the final bracket of width <= tol."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NoBracketError(f"f({lo})={flo:.3g} and f({hi})={fhi:.3g} have the same sign")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def neg_binomial_pmf(q, j, p):
    """P(q failures before the j-th success), success probability p.

    Evaluated as C(j+q-1, q) p^j (1-p)^q in log space; vectorises over q.
    """
    q = np.asarray(q, dtype=float)
    if p >= 1.0:
        return np.where(q == 0, 1.0, 0.0) if q.ndim else float(q == 0)
    logc = gammaln(j + q) - gammaln(q + 1.0) - gammaln(j)
    out = np.exp(logc + j * math.log(p) + q * math.log1p(-p))
    return out if q.ndim else float(out)
