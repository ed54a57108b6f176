"""Pure-numpy implementations of the O(M^2) history sums.

All functions take nodes ``t`` of shape (M+1,) and values of shape (M+1, S)
and return an array of shape (M+1, S).  Normalising Gamma factors are applied
by the callers.

Panel integrals over y in [b - h, b] are evaluated without forming
differences of nearly equal powers: on strongly graded grids h / b can be
1e-20 and the naive b^g - a^g loses every digit.
"""

import numpy as np

SERIES_CUT = 0.25
SERIES_TERMS = 40


def power_panel(b, h, g):
    """P = int y^g dy and Q = int y^g (b - y) dy over [b - h, b]."""
    b = np.asarray(b, dtype=float)
    h = np.asarray(h, dtype=float)
    x = h / b
    a = b - h
    whole = x >= 1.0
    xl = np.where(whole, 0.0, x)
    P = -(b ** (g + 1.0)) * np.expm1((g + 1.0) * np.log1p(-xl)) / (g + 1.0)
    P = np.where(whole, b ** (g + 1.0) / (g + 1.0), P)
    small = x < SERIES_CUT
    # series in x for small panels: int_0^1 z (1 - x z)^g dz = sum_k binom(g, k) (-x)^k / (k + 2)
    xs = np.where(small, x, 0.0)
    c = np.ones_like(xs)
    ser = c / 2.0
    for k in range(1, SERIES_TERMS):
        c = c * (g - k + 1.0) / k * (-xs)
        term = c / (k + 2.0)
        ser = ser + term
        if np.all(np.abs(term) < 1e-17 * ser):
            break
    q_small = h * h * b**g * ser
    with np.errstate(divide="ignore", invalid="ignore"):
        q_big = b * P - (b ** (g + 2.0) - np.where(a > 0, a, 0.0) ** (g + 2.0)) / (g + 2.0)
    Q = np.where(small, q_small, q_big)
    return P, Q


def power_diff(b, h, e):
    """b^e - (b - h)^e."""
    b = np.asarray(b, dtype=float)
    x = np.asarray(h, dtype=float) / b
    whole = x >= 1.0
    xl = np.where(whole, 0.0, x)
    return np.where(whole, b**e, -(b**e) * np.expm1(e * np.log1p(-xl)))


def rl_apply(t, f, alpha):
    """Product-trapezoid sums for int_0^{t_i} (t_i - s)^(alpha-1) f(s) ds."""
    M = t.shape[0] - 1
    out = np.zeros_like(f)
    g = alpha - 1.0
    for i in range(1, M + 1):
        b = t[i] - t[:i]
        h = t[1:i + 1] - t[:i]
        P, Q = power_panel(b, h, g)
        wr = Q / h
        w = np.zeros(i + 1)
        w[:i] += P - wr
        w[1:] += wr
        out[i] = w @ f[:i + 1]
    return out


def adjoint_apply(t, phi, alpha):
    """Product-trapezoid sums for int_{t_i}^T (r - t_i)^(alpha-1) phi(r) dr."""
    M = t.shape[0] - 1
    out = np.zeros_like(phi)
    g = alpha - 1.0
    for i in range(M):
        b = t[i + 1:] - t[i]
        h = t[i + 1:] - t[i:M]
        P, Q = power_panel(b, h, g)
        wl = Q / h
        w = np.zeros(M - i + 1)
        w[:-1] += wl
        w[1:] += P - wl
        out[i] = w @ phi[i:]
    return out


def l1_apply(t, u, alpha):
    """L1 sums: sum_j slope_j [(t_i - t_j)^(1-alpha) - (t_i - t_{j+1})^(1-alpha)]."""
    M = t.shape[0] - 1
    out = np.zeros_like(u)
    h = np.diff(t)
    slopes = np.diff(u, axis=0) / h[:, None]
    e = 1.0 - alpha
    for i in range(1, M + 1):
        w = power_diff(t[i] - t[:i], h[:i], e)
        out[i] = w @ slopes[:i]
    return out


def marchaud_apply(t, u, alpha):
    """(u_i - u_0) t_i^-alpha + alpha int_0^{t_i} (u_i - u(s)) (t_i - s)^(-alpha-1) ds.

    u(s) is the piecewise-linear interpolant; panel integrals are exact.
    """
    M = t.shape[0] - 1
    out = np.zeros_like(u)
    h = np.diff(t)
    slopes = np.diff(u, axis=0) / h[:, None]
    for i in range(1, M + 1):
        acc = (u[i] - u[0]) * t[i] ** (-alpha)
        acc = acc + alpha * slopes[i - 1] * h[i - 1] ** (1 - alpha) / (1 - alpha)
        if i > 1:
            b = t[i] - t[:i - 1]
            P, Q = power_panel(b, h[:i - 1], -alpha - 1.0)
            jump = u[i][None, :] - u[1:i]
            diffs = np.diff(u[:i], axis=0)
            acc = acc + alpha * (P @ jump + (P - Q / h[:i - 1]) @ diffs)
        out[i] = acc
    return out
