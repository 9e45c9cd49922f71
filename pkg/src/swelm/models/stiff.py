"""Adaptive TR-BDF2 integrator (one-step, L-stable, second order) compiled with numba.

The right-hand side and Jacobian are passed as numba-jitted functions of
``(y, k)``.  Both implicit stages share one LU factorization of
``I - d h J``; the local error estimate is the divided-difference form of
Hosea and Shampine, filtered through the same factorization.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

GAMMA = 2.0 - math.sqrt(2.0)
D = GAMMA / 2.0
W1 = 1.0 / (GAMMA * (2.0 - GAMMA))
ERR_CONST = abs((-3.0 * GAMMA**2 + 4.0 * GAMMA - 2.0) / (12.0 * (2.0 - GAMMA)))

OK = 0
STEP_UNDERFLOW = 1
MAX_STEPS = 2
NEWTON_FAILURE = 3


@nb.njit(cache=True)
def _lu_factor(A, piv):
    n = A.shape[0]
    for c in range(n):
        p = c
        best = abs(A[c, c])
        for r in range(c + 1, n):
            if abs(A[r, c]) > best:
                best = abs(A[r, c])
                p = r
        piv[c] = p
        if best == 0.0:
            return False
        if p != c:
            for j in range(n):
                tmp = A[c, j]
                A[c, j] = A[p, j]
                A[p, j] = tmp
        for r in range(c + 1, n):
            A[r, c] /= A[c, c]
            f = A[r, c]
            for j in range(c + 1, n):
                A[r, j] -= f * A[c, j]
    return True


@nb.njit(cache=True)
def _lu_solve(LU, piv, b):
    n = LU.shape[0]
    x = b.copy()
    for c in range(n):
        p = piv[c]
        if p != c:
            tmp = x[c]
            x[c] = x[p]
            x[p] = tmp
    for r in range(n):
        for j in range(r):
            x[r] -= LU[r, j] * x[j]
    for r in range(n - 1, -1, -1):
        for j in range(r + 1, n):
            x[r] -= LU[r, j] * x[j]
        x[r] /= LU[r, r]
    return x


@nb.njit(cache=True)
def _wnorm(v, scale):
    s = 0.0
    for i in range(v.shape[0]):
        q = v[i] / scale[i]
        s += q * q
    return math.sqrt(s / v.shape[0])


@nb.njit(cache=True)
def _newton(rhs, k, z, base, dh, LU, piv, atol, rtol, max_iter):
    """Solve z - dh f(z) = base by simplified Newton; returns converged flag."""
    n = z.shape[0]
    scale = np.empty(n)
    for i in range(n):
        scale[i] = atol + rtol * abs(z[i])
    prev = 0.0
    for it in range(max_iter):
        fz = rhs(z, k)
        r = np.empty(n)
        for i in range(n):
            r[i] = base[i] + dh * fz[i] - z[i]
        dz = _lu_solve(LU, piv, r)
        for i in range(n):
            z[i] += dz[i]
        nrm = _wnorm(dz, scale)
        if nrm <= 1e-3:
            return True
        if it > 0 and nrm > 0.9 * prev:
            return False
        prev = nrm
    return False


@nb.njit(cache=True)
def tr_bdf2(rhs, jac, y0, k, t_out, rtol, atol, h0, max_steps, floor):
    """Integrate on [0, t_out[-1]] and return states at the (sorted, >= 0) times ``t_out``.

    Steps producing a component below ``floor`` are rejected.
    Returns (states, status, accepted_steps).
    """
    n = y0.shape[0]
    n_out = t_out.shape[0]
    out = np.empty((n_out, n))
    T = t_out[n_out - 1]
    t = 0.0
    y = y0.copy()
    f0 = rhs(y, k)
    j_out = 0
    while j_out < n_out and t_out[j_out] <= 0.0:
        out[j_out] = y
        j_out += 1
    h = min(h0, T) if T > 0 else 0.0
    piv = np.empty(n, dtype=np.int64)
    steps = 0
    while t < T:
        if steps >= max_steps:
            return out, MAX_STEPS, steps
        h = min(h, T - t)
        if h <= 1e-13 * max(1.0, t):
            return out, STEP_UNDERFLOW, steps
        J = jac(y, k)
        M = np.eye(n) - D * h * J
        if not _lu_factor(M, piv):
            h *= 0.25
            continue
        dh = D * h
        # trapezoidal stage to t + gamma h
        base1 = y + dh * f0
        yg = y + GAMMA * h * f0
        if not _newton(rhs, k, yg, base1, dh, M, piv, atol, rtol, 8):
            h *= 0.25
            continue
        fg = rhs(yg, k)
        # BDF2 stage to t + h
        base2 = y + W1 * (yg - y)  # = W1 yg - (W1 - 1) y, the BDF2 history term
        y1 = yg + ((1.0 - GAMMA) / GAMMA) * (yg - y)
        if not _newton(rhs, k, y1, base2, dh, M, piv, atol, rtol, 8):
            h *= 0.25
            continue
        f1 = rhs(y1, k)
        est = _lu_solve(M, piv, 2.0 * ERR_CONST * h * (f0 / GAMMA - fg / (GAMMA * (1.0 - GAMMA))
                                                           + f1 / (1.0 - GAMMA)))
        scale = np.empty(n)
        for i in range(n):
            scale[i] = atol + rtol * max(abs(y[i]), abs(y1[i]))
        err = _wnorm(est, scale)
        if err > 1.0 or y1.min() < floor:
            h *= max(0.2, 0.9 * err ** (-1.0 / 3.0)) if err > 1.0 else 0.5
            continue
        # accepted: cubic Hermite dense output on (t, t + h]
        t1 = t + h
        while j_out < n_out and t_out[j_out] <= t1:
            s = (t_out[j_out] - t) / h
            # increment form h00 = 1 - h01, so a steady state is reproduced exactly
            h10 = s * (1.0 - s) ** 2
            h01 = s * s * (3.0 - 2.0 * s)
            h11 = s * s * (s - 1.0)
            out[j_out] = y + h01 * (y1 - y) + h * (h10 * f0 + h11 * f1)
            j_out += 1
        t = t1
        y = y1
        f0 = f1
        steps += 1
        fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** (-1.0 / 3.0)))
        h *= fac
    while j_out < n_out:
        out[j_out] = y
        j_out += 1
    return out, OK, steps
