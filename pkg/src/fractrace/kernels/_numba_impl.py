"""numba versions of the kernels in ``_numpy_impl`` (same signatures)."""

import math

import numpy as np
from numba import njit

SERIES_CUT = 0.25
SERIES_TERMS = 40


@njit(cache=True, nogil=True)
def _panel(b, h, g):
    x = h / b
    if x >= 1.0:
        P = b ** (g + 1.0) / (g + 1.0)
    else:
        P = -(b ** (g + 1.0)) * math.expm1((g + 1.0) * math.log1p(-x)) / (g + 1.0)
    if x < SERIES_CUT:
        c = 1.0
        ser = 0.5
        for k in range(1, SERIES_TERMS):
            c = c * (g - k + 1.0) / k * (-x)
            term = c / (k + 2.0)
            ser += term
            if abs(term) < 1e-17 * ser:
                break
        Q = h * h * b**g * ser
    else:
        a = b - h
        tail = a ** (g + 2.0) if a > 0.0 else 0.0
        Q = b * P - (b ** (g + 2.0) - tail) / (g + 2.0)
    return P, Q


@njit(cache=True, nogil=True)
def _diff(b, h, e):
    x = h / b
    if x >= 1.0:
        return b**e
    return -(b**e) * math.expm1(e * math.log1p(-x))


@njit(cache=True, nogil=True)
def rl_apply(t, f, alpha):
    M = t.shape[0] - 1
    S = f.shape[1]
    out = np.zeros_like(f)
    g = alpha - 1.0
    for i in range(1, M + 1):
        for j in range(i):
            h = t[j + 1] - t[j]
            P, Q = _panel(t[i] - t[j], h, g)
            wr = Q / h
            wl = P - wr
            for s in range(S):
                out[i, s] += wl * f[j, s] + wr * f[j + 1, s]
    return out


@njit(cache=True, nogil=True)
def adjoint_apply(t, phi, alpha):
    M = t.shape[0] - 1
    S = phi.shape[1]
    out = np.zeros_like(phi)
    g = alpha - 1.0
    for i in range(M):
        for j in range(i, M):
            h = t[j + 1] - t[j]
            P, Q = _panel(t[j + 1] - t[i], h, g)
            wl = Q / h
            wr = P - wl
            for s in range(S):
                out[i, s] += wl * phi[j, s] + wr * phi[j + 1, s]
    return out


@njit(cache=True, nogil=True)
def l1_apply(t, u, alpha):
    M = t.shape[0] - 1
    S = u.shape[1]
    out = np.zeros_like(u)
    e = 1.0 - alpha
    for i in range(1, M + 1):
        for j in range(i):
            h = t[j + 1] - t[j]
            w = _diff(t[i] - t[j], h, e) / h
            for s in range(S):
                out[i, s] += w * (u[j + 1, s] - u[j, s])
    return out


@njit(cache=True, nogil=True)
def marchaud_apply(t, u, alpha):
    M = t.shape[0] - 1
    S = u.shape[1]
    out = np.zeros_like(u)
    for i in range(1, M + 1):
        ti = t[i] ** (-alpha)
        hl = t[i] - t[i - 1]
        cl = alpha * hl ** (1 - alpha) / (1 - alpha) / hl
        for s in range(S):
            out[i, s] = (u[i, s] - u[0, s]) * ti + cl * (u[i, s] - u[i - 1, s])
        for j in range(i - 1):
            h = t[j + 1] - t[j]
            P, Q = _panel(t[i] - t[j], h, -alpha - 1.0)
            wd = P - Q / h
            for s in range(S):
                out[i, s] += alpha * (P * (u[i, s] - u[j + 1, s]) + wd * (u[j + 1, s] - u[j, s]))
    return out
