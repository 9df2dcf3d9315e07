"""RK4 kernels for the Riccati equation and the finite-pool moment systems.

Inputs are sampled on the half grid (nodes and midpoints interleaved, length
2*steps + 1) so that each RK4 stage reads its hazard and recovery value
directly. Kernels return a status code instead of raising so that the numba
and numpy variants share one calling convention; the public wrappers in
:mod:`riccati_tontine.pool` translate codes into exceptions.

Moment-system modes:

    GIVEN    recovery k(t) supplied on the half grid
    KAPPA1   k solved algebraically from 1 = k * sum_{j>=2} u_j/j + u_1
    KAPPAK   k carried as an extra state with
             k' = -(mu+lam) k + lam k^2 + lam k^2 (1-k) u_1
"""
import numpy as np

from ._accel import njit, pick

GIVEN, KAPPA1, KAPPAK = 0, 1, 2
OK, NONFINITE, DEGENERATE = 0, 1, 2
DENOM_FLOOR = 1e-12


# --- scalar Riccati equation -------------------------------------------------

def _riccati_py(lam_half, h, mu):
    steps = (lam_half.shape[0] - 1) // 2
    k = np.empty(steps + 1)
    k[0] = y = 1.0
    for i in range(steps):
        l0, l1, l2 = lam_half[2 * i], lam_half[2 * i + 1], lam_half[2 * i + 2]
        a = -(mu + l0) * y + l0 * y * y
        yb = y + 0.5 * h * a
        b = -(mu + l1) * yb + l1 * yb * yb
        yc = y + 0.5 * h * b
        c = -(mu + l1) * yc + l1 * yc * yc
        yd = y + h * c
        d = -(mu + l2) * yd + l2 * yd * yd
        y = y + h / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        k[i + 1] = y
    return k


riccati_rk4_numba = njit(_riccati_py)
riccati_rk4_numpy = _riccati_py  # scalar recursion: nothing to vectorise


# --- moment systems: numba ---------------------------------------------------

@njit
def _kappa1_k(u, n):
    s2 = 0.0
    for j in range(2, n + 1):
        s2 += u[j - 1] / j
    if s2 < DENOM_FLOOR:
        return -1.0, s2
    k = (1.0 - u[0]) / s2
    return (k if k > 0.0 else 0.0), s2


@njit
def _deriv(u, v, k, lam, mu, a2, n, with_v, du, dv):
    for j in range(1, n + 1):
        up = u[j] if j < n else 0.0
        du[j - 1] = mu * u[j - 1] + lam * (j * (1.0 - k / (j + 1)) * up - (j - 1) * u[j - 1])
    if with_v:
        for j in range(1, n + 1):
            vp = v[j] if j < n else 0.0
            f = 1.0 - k / (j + 1)
            dv[j - 1] = v[j - 1] * (a2 - (j - 1) * lam) + vp * lam * j * f * f


@njit
def _kappak_dk(k, lam, mu, u1):
    return -(mu + lam) * k + lam * k * k + lam * k * k * (1.0 - k) * u1


@njit
def moments_rk4_numba(lam_half, k_half, h, n, mu, sigma, mode, with_v, stride):
    steps = (lam_half.shape[0] - 1) // 2
    a2 = 2.0 * mu + sigma * sigma
    nrec = steps // stride + 1
    k_nodes = np.empty(steps + 1)
    z_nodes = np.empty(steps + 1)
    u1_nodes = np.empty(steps + 1)
    u2_nodes = np.empty(steps + 1)
    w_nodes = np.zeros(steps + 1)
    u_rec = np.zeros((nrec, n))
    v_rec = np.zeros((nrec if with_v else 0, n))

    u = np.zeros(n)
    v = np.zeros(n)
    u[n - 1] = n
    v[n - 1] = float(n) * n
    k = 1.0 if mode != GIVEN else k_half[0]

    ut = np.empty(n)
    vt = np.empty(n)
    du1 = np.empty(n)
    du2 = np.empty(n)
    du3 = np.empty(n)
    du4 = np.empty(n)
    dv1 = np.zeros(n)
    dv2 = np.zeros(n)
    dv3 = np.zeros(n)
    dv4 = np.zeros(n)
    status = OK

    for i in range(steps + 1):
        # record node i
        kk = k
        if mode == KAPPA1:
            kk, _s2 = _kappa1_k(u, n)
            if kk < 0.0:
                return k_nodes, z_nodes, u1_nodes, u2_nodes, w_nodes, u_rec, v_rec, DEGENERATE, i
        elif mode == GIVEN:
            kk = k_half[2 * i]
        k_nodes[i] = kk
        z = 0.0
        w = 0.0
        for j in range(1, n + 1):
            z += u[j - 1] / j
            if with_v:
                w += v[j - 1] / (j * j)
        z_nodes[i] = z
        w_nodes[i] = w
        u1_nodes[i] = u[0]
        u2_nodes[i] = u[1] if n >= 2 else 0.0
        if i % stride == 0:
            r = i // stride
            for j in range(n):
                u_rec[r, j] = u[j]
                if with_v:
                    v_rec[r, j] = v[j]
        if not np.isfinite(z) or not np.isfinite(w) or not np.isfinite(kk):
            return k_nodes, z_nodes, u1_nodes, u2_nodes, w_nodes, u_rec, v_rec, NONFINITE, i
        if i == steps:
            break

        l0 = lam_half[2 * i]
        l1 = lam_half[2 * i + 1]
        l2 = lam_half[2 * i + 2]

        # stage 1
        if mode == GIVEN:
            ks = k_half[2 * i]
        elif mode == KAPPA1:
            ks = kk
        else:
            ks = k
        _deriv(u, v, ks, l0, mu, a2, n, with_v, du1, dv1)
        dk1 = _kappak_dk(k, l0, mu, u[0]) if mode == KAPPAK else 0.0
        # stage 2
        for j in range(n):
            ut[j] = u[j] + 0.5 * h * du1[j]
            vt[j] = v[j] + 0.5 * h * dv1[j]
        kt = k + 0.5 * h * dk1
        if mode == GIVEN:
            ks = k_half[2 * i + 1]
        elif mode == KAPPA1:
            ks, _s2 = _kappa1_k(ut, n)
            if ks < 0.0:
                return k_nodes, z_nodes, u1_nodes, u2_nodes, w_nodes, u_rec, v_rec, DEGENERATE, i
        else:
            ks = kt
        _deriv(ut, vt, ks, l1, mu, a2, n, with_v, du2, dv2)
        dk2 = _kappak_dk(kt, l1, mu, ut[0]) if mode == KAPPAK else 0.0
        # stage 3
        for j in range(n):
            ut[j] = u[j] + 0.5 * h * du2[j]
            vt[j] = v[j] + 0.5 * h * dv2[j]
        kt = k + 0.5 * h * dk2
        if mode == KAPPA1:
            ks, _s2 = _kappa1_k(ut, n)
            if ks < 0.0:
                return k_nodes, z_nodes, u1_nodes, u2_nodes, w_nodes, u_rec, v_rec, DEGENERATE, i
        elif mode == KAPPAK:
            ks = kt
        _deriv(ut, vt, ks, l1, mu, a2, n, with_v, du3, dv3)
        dk3 = _kappak_dk(kt, l1, mu, ut[0]) if mode == KAPPAK else 0.0
        # stage 4
        for j in range(n):
            ut[j] = u[j] + h * du3[j]
            vt[j] = v[j] + h * dv3[j]
        kt = k + h * dk3
        if mode == GIVEN:
            ks = k_half[2 * i + 2]
        elif mode == KAPPA1:
            ks, _s2 = _kappa1_k(ut, n)
            if ks < 0.0:
                return k_nodes, z_nodes, u1_nodes, u2_nodes, w_nodes, u_rec, v_rec, DEGENERATE, i
        else:
            ks = kt
        _deriv(ut, vt, ks, l2, mu, a2, n, with_v, du4, dv4)
        dk4 = _kappak_dk(kt, l2, mu, ut[0]) if mode == KAPPAK else 0.0

        for j in range(n):
            u[j] += h / 6.0 * (du1[j] + 2.0 * du2[j] + 2.0 * du3[j] + du4[j])
            if with_v:
                v[j] += h / 6.0 * (dv1[j] + 2.0 * dv2[j] + 2.0 * dv3[j] + dv4[j])
        if mode == KAPPAK:
            k += h / 6.0 * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4)

    return k_nodes, z_nodes, u1_nodes, u2_nodes, w_nodes, u_rec, v_rec, status, steps


# --- moment systems: numpy ---------------------------------------------------

def moments_rk4_numpy(lam_half, k_half, h, n, mu, sigma, mode, with_v, stride):
    steps = (lam_half.shape[0] - 1) // 2
    a2 = 2.0 * mu + sigma * sigma
    j = np.arange(1, n + 1, dtype=float)
    inv_j = 1.0 / j
    inv_j2 = inv_j * inv_j
    nrec = steps // stride + 1
    k_nodes = np.empty(steps + 1)
    z_nodes = np.empty(steps + 1)
    u1_nodes = np.empty(steps + 1)
    u2_nodes = np.empty(steps + 1)
    w_nodes = np.zeros(steps + 1)
    u_rec = np.zeros((nrec, n))
    v_rec = np.zeros((nrec if with_v else 0, n))

    def kappa1(u):
        s2 = u[1:] @ inv_j[1:]
        if s2 < DENOM_FLOOR:
            return None
        return max(0.0, (1.0 - u[0]) / s2)

    jm1 = j - 1.0
    inv_jp1 = 1.0 / (j + 1.0)
    up = np.zeros(n)  # shifted copies; last entry stays 0
    vp = np.zeros(n)

    def deriv(u, v, k, lam):
        up[:-1] = u[1:]
        f = 1.0 - k * inv_jp1
        du = mu * u + lam * (j * f * up - jm1 * u)
        if not with_v:
            return du, v
        vp[:-1] = v[1:]
        dv = v * (a2 - jm1 * lam) + vp * (lam * j * f * f)
        return du, dv

    def dk(k, lam, u1):
        return -(mu + lam) * k + lam * k * k + lam * k * k * (1.0 - k) * u1

    def fail(code, i):
        return k_nodes, z_nodes, u1_nodes, u2_nodes, w_nodes, u_rec, v_rec, code, i

    u = np.zeros(n)
    u[-1] = n
    v = np.zeros(n)
    v[-1] = float(n) * n
    k = 1.0 if mode != GIVEN else k_half[0]
    zero_v = v * 0.0

    for i in range(steps + 1):
        if mode == KAPPA1:
            kk = kappa1(u)
            if kk is None:
                return fail(DEGENERATE, i)
        elif mode == GIVEN:
            kk = k_half[2 * i]
        else:
            kk = k
        k_nodes[i] = kk
        z_nodes[i] = u @ inv_j
        if with_v:
            w_nodes[i] = v @ inv_j2
        u1_nodes[i] = u[0]
        u2_nodes[i] = u[1] if n >= 2 else 0.0
        if i % stride == 0:
            u_rec[i // stride] = u
            if with_v:
                v_rec[i // stride] = v
        if not (np.isfinite(z_nodes[i]) and np.isfinite(w_nodes[i]) and np.isfinite(kk)):
            return fail(NONFINITE, i)
        if i == steps:
            break

        l0, l1, l2 = lam_half[2 * i], lam_half[2 * i + 1], lam_half[2 * i + 2]
        vv = v if with_v else zero_v

        ks = k_half[2 * i] if mode == GIVEN else kk
        du1, dv1 = deriv(u, vv, ks, l0)
        dk1 = dk(k, l0, u[0]) if mode == KAPPAK else 0.0

        ut, vt, kt = u + 0.5 * h * du1, vv + 0.5 * h * dv1, k + 0.5 * h * dk1
        if mode == GIVEN:
            ks = k_half[2 * i + 1]
        elif mode == KAPPA1:
            ks = kappa1(ut)
            if ks is None:
                return fail(DEGENERATE, i)
        else:
            ks = kt
        du2, dv2 = deriv(ut, vt, ks, l1)
        dk2 = dk(kt, l1, ut[0]) if mode == KAPPAK else 0.0

        ut, vt, kt = u + 0.5 * h * du2, vv + 0.5 * h * dv2, k + 0.5 * h * dk2
        if mode == KAPPA1:
            ks = kappa1(ut)
            if ks is None:
                return fail(DEGENERATE, i)
        elif mode == KAPPAK:
            ks = kt
        du3, dv3 = deriv(ut, vt, ks, l1)
        dk3 = dk(kt, l1, ut[0]) if mode == KAPPAK else 0.0

        ut, vt, kt = u + h * du3, vv + h * dv3, k + h * dk3
        if mode == GIVEN:
            ks = k_half[2 * i + 2]
        elif mode == KAPPA1:
            ks = kappa1(ut)
            if ks is None:
                return fail(DEGENERATE, i)
        else:
            ks = kt
        du4, dv4 = deriv(ut, vt, ks, l2)
        dk4 = dk(kt, l2, ut[0]) if mode == KAPPAK else 0.0

        u = u + h / 6.0 * (du1 + 2.0 * du2 + 2.0 * du3 + du4)
        if with_v:
            v = v + h / 6.0 * (dv1 + 2.0 * dv2 + 2.0 * dv3 + dv4)
        if mode == KAPPAK:
            k = k + h / 6.0 * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4)

    return k_nodes, z_nodes, u1_nodes, u2_nodes, w_nodes, u_rec, v_rec, OK, steps


riccati_rk4 = pick(riccati_rk4_numba, riccati_rk4_numpy)
moments_rk4 = pick(moments_rk4_numba, moments_rk4_numpy)


# --- scalar linear ODE y' = a(t) + c(t) y ------------------------------------

def _linear_py(a_half, c_half, h, y0):
    steps = (a_half.shape[0] - 1) // 2
    y = np.empty(steps + 1)
    y[0] = yi = y0
    for i in range(steps):
        a0, a1, a2 = a_half[2 * i], a_half[2 * i + 1], a_half[2 * i + 2]
        c0, c1, c2 = c_half[2 * i], c_half[2 * i + 1], c_half[2 * i + 2]
        d1 = a0 + c0 * yi
        d2 = a1 + c1 * (yi + 0.5 * h * d1)
        d3 = a1 + c1 * (yi + 0.5 * h * d2)
        d4 = a2 + c2 * (yi + h * d3)
        yi = yi + h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
        y[i + 1] = yi
    return y


linear_rk4_numba = njit(_linear_py)
linear_rk4_numpy = _linear_py
linear_rk4 = pick(linear_rk4_numba, linear_rk4_numpy)
