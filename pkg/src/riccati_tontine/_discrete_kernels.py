"""Period-by-period recursion for the periodic-payout tontine.

For each period i the recovery k_i is fixed by

    1 = k_i e^{delta mu} sum_j u_j(i-1) / j,

then the survivor moments advance (agent conditioned to survive) as

    u_j(i) = (1/p_i) sum_q NB(q; j, p_i) u_{j+q}(i-1) [e^{delta mu} - k_i q/(j+q)].
"""
import math

import numpy as np
from scipy.special import gammaln

from ._accel import njit, pick
from ._ode_kernels import DEGENERATE, DENOM_FLOOR, NONFINITE, OK


@njit
def discrete_recursion_numba(p, delta, mu, n):
    M = p.shape[0]
    growth = math.exp(delta * mu)
    k = np.empty(M)
    u = np.zeros((M + 1, n))
    u[0, n - 1] = n
    lg = np.empty(2 * n + 1)
    for a in range(2 * n + 1):
        lg[a] = math.lgamma(a) if a > 0 else 0.0
    for i in range(M):
        s = 0.0
        for j in range(1, n + 1):
            s += u[i, j - 1] / j
        if not s > DENOM_FLOOR:
            return k, u, DEGENERATE, i
        ki = 1.0 / (growth * s)
        k[i] = ki
        lp = math.log(p[i])
        lq = math.log1p(-p[i])
        for j in range(1, n + 1):
            acc = 0.0
            for q in range(0, n - j + 1):
                w = math.exp(lg[j + q] - lg[q + 1] - lg[j] + j * lp + q * lq)
                acc += w * u[i, j + q - 1] * (growth - ki * q / (j + q))
            u[i + 1, j - 1] = acc / p[i]
        if not np.isfinite(ki):
            return k, u, NONFINITE, i
    return k, u, OK, M


def discrete_recursion_numpy(p, delta, mu, n):
    M = p.shape[0]
    growth = math.exp(delta * mu)
    k = np.empty(M)
    u = np.zeros((M + 1, n))
    u[0, -1] = n
    j = np.arange(1, n + 1, dtype=float)
    # column l = j + q (1-based), q = l - j >= 0
    l = j[None, :]
    q = l - j[:, None]
    valid = q >= 0
    qv = np.where(valid, q, 0.0)
    logc = gammaln(j[:, None] + qv) - gammaln(qv + 1.0) - gammaln(j[:, None])
    haircut = np.where(valid, qv / l, 0.0)
    for i in range(M):
        s = u[i] @ (1.0 / j)
        if not s > DENOM_FLOOR:
            return k, u, DEGENERATE, i
        ki = 1.0 / (growth * s)
        k[i] = ki
        w = np.where(valid, np.exp(logc + j[:, None] * math.log(p[i]) + qv * math.log1p(-p[i])), 0.0)
        u[i + 1] = (w * (growth - ki * haircut)) @ u[i] / p[i]
        if not np.isfinite(ki):
            return k, u, NONFINITE, i
    return k, u, OK, M


discrete_recursion = pick(discrete_recursion_numba, discrete_recursion_numpy)
