"""Discrete fractional integrals and derivatives on (possibly graded) time grids.

Values are arrays whose first axis runs over the time nodes t_0..t_M; any
trailing axes (spatial points) are carried along.  All operators act on the
piecewise-linear interpolant of the data, so every panel integral is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError
from .grid import TimeGrid
from .quadrature import power_panel_weights


@dataclass(frozen=True)
class FracOrder:
    """Order k + alpha with alpha in (0, 1) and k in {0, 1}."""

    alpha: float
    k: int = 0

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.k not in (0, 1):
            raise ParameterError(f"k must be 0 or 1, got {self.k}")

    @property
    def beta(self) -> float:
        return self.k + self.alpha


def _nodes(tgrid) -> np.ndarray:
    return tgrid.t if isinstance(tgrid, TimeGrid) else np.asarray(tgrid, dtype=float)


def _check_alpha(alpha: float, upper: float = 1.0, closed: bool = True) -> None:
    ok = 0.0 < alpha <= upper if closed else 0.0 < alpha < upper
    if not ok:
        raise ParameterError(f"order {alpha} outside the supported range")


def _check_values(values, t) -> np.ndarray:
    v = np.asarray(values)
    if v.shape[0] != t.shape[0]:
        raise ParameterError(f"values have {v.shape[0]} time samples, grid has {t.shape[0]}")
    return v


def rl_integral(f, tgrid, alpha: float) -> np.ndarray:
    """I^alpha f at every node (product trapezoid; zero at t_0)."""
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    t = _nodes(tgrid)
    f = _check_values(f, t)
    return kernels.rl_apply(t, f, alpha) / math.gamma(alpha)


def adjoint_integral(phi, tgrid, alpha: float) -> np.ndarray:
    """J^alpha phi(t) = Gamma(alpha)^-1 int_t^T (r - t)^(alpha-1) phi(r) dr; zero at t_M."""
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    t = _nodes(tgrid)
    phi = _check_values(phi, t)
    return kernels.adjoint_apply(t, phi, alpha) / math.gamma(alpha)


def _jump(values, u0) -> np.ndarray:
    return np.asarray(values)[0] - np.asarray(u0)


def caputo_derivative(u, u0, tgrid, alpha: float, method: str = "l1") -> np.ndarray:
    """d/dt I^(1-alpha)(u - u0) at the nodes; entry 0 is set to nan.

    ``method="l1"`` differentiates the interpolant exactly (the L1 scheme).
    ``method="rl-diff"`` differentiates the product-trapezoid values of
    I^(1-alpha)(u - u0) by one-sided finite differences (second order from t_2
    on, first order at t_1).  If u(t_0) differs from u0 the jump contributes
    (u(t_0) - u0) t^-alpha / Gamma(1 - alpha).
    """
    _check_alpha(alpha, closed=False)
    t = _nodes(tgrid)
    u = _check_values(u, t)
    if method == "l1":
        out = kernels.l1_apply(t, u, alpha) / math.gamma(2.0 - alpha)
        jump = _jump(u, u0)
        if np.any(jump != 0):
            tt = t[1:].reshape((-1,) + (1,) * (u.ndim - 1))
            out[1:] = out[1:] + jump * tt ** (-alpha) / math.gamma(1.0 - alpha)
    elif method == "rl-diff":
        g = rl_integral(u - np.asarray(u0), t, 1.0 - alpha)
        out = backward_derivative(g, t)
    else:
        raise ParameterError(f"unknown method {method!r}")
    out = np.array(out, dtype=np.result_type(out, float))
    out[0] = np.nan
    return out


def rl_derivative(u, tgrid, alpha: float) -> np.ndarray:
    """Riemann-Liouville derivative d/dt I^(1-alpha) u (no initial value removed)."""
    u = np.asarray(u)
    return caputo_derivative(u, np.zeros_like(u[0]), tgrid, alpha)


def backward_derivative(g, tgrid) -> np.ndarray:
    """One-sided derivative: first order at t_1, three-point backward from t_2 on."""
    t = _nodes(tgrid)
    g = _check_values(g, t)
    out = np.full(g.shape, np.nan, dtype=np.result_type(g, float))
    h = np.diff(t)
    out[1] = (g[1] - g[0]) / h[0]
    if t.size > 2:
        h1 = h[1:].reshape((-1,) + (1,) * (g.ndim - 1))
        h0 = h[:-1].reshape(h1.shape)
        # derivative at t_i of the quadratic through t_{i-2}, t_{i-1}, t_i
        c_i = (2 * h1 + h0) / (h1 * (h1 + h0))
        c_im1 = -(h1 + h0) / (h1 * h0)
        c_im2 = h1 / (h0 * (h1 + h0))
        out[2:] = c_i * g[2:] + c_im1 * g[1:-1] + c_im2 * g[:-2]
    return out


def nodal_derivative(u, tgrid) -> np.ndarray:
    """Second-order three-point derivative at every node (one-sided at the ends)."""
    t = _nodes(tgrid)
    u = _check_values(u, t)
    if t.size < 3:
        raise ParameterError("need at least three nodes")
    sh = (-1,) + (1,) * (u.ndim - 1)
    h = np.diff(t)
    out = np.empty(u.shape, dtype=np.result_type(u, float))
    h0 = h[:-1].reshape(sh)
    h1 = h[1:].reshape(sh)
    out[1:-1] = (-h1 / (h0 * (h0 + h1)) * u[:-2]
                 + (h1 - h0) / (h0 * h1) * u[1:-1]
                 + h0 / (h1 * (h0 + h1)) * u[2:])
    a, b = h[0], h[1]
    out[0] = (-(2 * a + b) / (a * (a + b)) * u[0] + (a + b) / (a * b) * u[1] - a / (b * (a + b)) * u[2])
    a, b = h[-1], h[-2]
    out[-1] = ((2 * a + b) / (a * (a + b)) * u[-1] - (a + b) / (a * b) * u[-2] + a / (b * (a + b)) * u[-3])
    return out


def second_backward_derivative(g, tgrid) -> np.ndarray:
    """Second derivative from the quadratic through t_{i-2}, t_{i-1}, t_i (nan at t_0, t_1)."""
    t = _nodes(tgrid)
    g = _check_values(g, t)
    out = np.full(g.shape, np.nan, dtype=np.result_type(g, float))
    sh = (-1,) + (1,) * (g.ndim - 1)
    h = np.diff(t)
    h0 = h[:-1].reshape(sh)
    h1 = h[1:].reshape(sh)
    out[2:] = 2.0 * (g[2:] / (h1 * (h0 + h1)) - g[1:-1] / (h0 * h1) + g[:-2] / (h0 * (h0 + h1)))
    return out


def caputo_higher(u, traces, tgrid, alpha: float, k: int, method: str = "l1",
                  du=None) -> np.ndarray:
    """Caputo derivative of order k + alpha.

    For k = 1 this is the order-alpha derivative of du/dt with initial value
    ``traces[1]``.  Pass exact samples of du/dt as ``du`` when available;
    otherwise the second-order nodal derivative is used, which amplifies
    rounding noise by 1/h near t = 0 on strongly graded grids.
    ``method="rl-diff"`` instead takes the second backward difference of
    I^(1-alpha)(u - u0 - t u1).
    """
    FracOrder(alpha, k)
    t = _nodes(tgrid)
    u = _check_values(u, t)
    if traces is None or len(traces) < k + 1 or any(tr is None for tr in traces[:k + 1]):
        raise ParameterError(f"order {k}+alpha needs the initial traces u_0..u_{k}")
    if k == 0:
        return caputo_derivative(u, traces[0], t, alpha, method)
    u0, u1 = np.asarray(traces[0]), np.asarray(traces[1])
    if method == "l1":
        du = nodal_derivative(u - u0, t) if du is None else np.array(du, dtype=float)
        du[0] = u1
        return caputo_derivative(du, u1, t, alpha, "l1")
    if method == "rl-diff":
        tt = t.reshape((-1,) + (1,) * (u.ndim - 1))
        g = rl_integral(u - u0 - tt * u1, t, 1.0 - alpha)
        out = second_backward_derivative(g, t)
        out[0] = np.nan
        return out
    raise ParameterError(f"unknown method {method!r}")


def marchaud_derivative(u, u0, tgrid, alpha: float) -> np.ndarray:
    """Marchaud form of the Caputo derivative; entry 0 is nan.

    Gamma(1-alpha) D u(t) = (u(t) - u0) t^-alpha + alpha int_0^t (u(t) - u(s)) (t - s)^(-1-alpha) ds,
    with the singular last panel integrated against the linear interpolant.
    """
    _check_alpha(alpha, closed=False)
    t = _nodes(tgrid)
    u = _check_values(u, t)
    shifted = np.asarray(u, dtype=float) - np.asarray(u0)
    out = kernels.marchaud_apply(t, shifted, alpha) / math.gamma(1.0 - alpha)
    # the kernel measures u_i from the first sample; add the jump to the prescribed u0
    jump = shifted[0]
    if np.any(jump != 0):
        tt = t[1:].reshape((-1,) + (1,) * (u.ndim - 1))
        out[1:] = out[1:] + jump * tt ** (-alpha) / math.gamma(1.0 - alpha)
    out = np.array(out, dtype=float)
    out[0] = np.nan
    return out


def weighted_integral(g, tgrid, mu: float, start: int = 0) -> np.ndarray:
    """int_{t_start}^T g(t) t^mu dt for the piecewise-linear interpolant of g."""
    t = _nodes(tgrid)
    g = np.array(_check_values(g, t))
    g[:start] = 0.0
    w = np.zeros(t.size)
    w[start:] = power_panel_weights(t[start:], mu)
    return np.tensordot(w, g, axes=(0, 0))


def _check_hardy(q: float, mu: float) -> None:
    if not q > 1:
        raise ParameterError(f"q must exceed 1, got {q}")
    if not (-1.0 < mu < q - 1.0):
        raise ParameterError(f"mu={mu} violates the hypothesis mu in (-1, q-1) with q={q}")


def hardy_ratio(f, tgrid, alpha: float, q: float, mu: float) -> float:
    """int |t^-alpha I^alpha f|^q t^mu dt / int |f|^q t^mu dt."""
    _check_hardy(q, mu)
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    t = _nodes(tgrid)
    f = np.asarray(_check_values(f, t), dtype=float)
    g = np.empty_like(f)
    g[1:] = rl_integral(f, t, alpha)[1:] * (t[1:] ** (-alpha)).reshape((-1,) + (1,) * (f.ndim - 1))
    g[0] = f[0] / math.gamma(1.0 + alpha)
    num = weighted_integral(np.abs(g) ** q, t, mu)
    den = weighted_integral(np.abs(f) ** q, t, mu)
    return float(np.sum(num) / np.sum(den))


def weighted_bound_ratio(u, u0, tgrid, alpha: float, q: float, mu: float) -> float:
    """||t^-alpha (u - u0)||_{L_q(t^mu)} / ||Caputo u||_{L_q(t^mu)} (integrals from t_1)."""
    _check_hardy(q, mu)
    t = _nodes(tgrid)
    u = np.asarray(_check_values(u, t), dtype=float)
    d = caputo_derivative(u, u0, t, alpha)
    lhs = np.zeros_like(u)
    tt = t[1:].reshape((-1,) + (1,) * (u.ndim - 1))
    lhs[1:] = np.abs(u[1:] - u0) ** q * tt ** (-alpha * q)
    num = np.sum(weighted_integral(lhs, t, mu, start=1))
    den = np.sum(weighted_integral(np.abs(d) ** q, t, mu, start=1))
    return float((num / den) ** (1.0 / q))


def trace_inequality_ratio(u, u0: float, tgrid, alpha: float, q: float, mu: float) -> float:
    """|u0| / (T^-(1+mu)/q ||u|| + T^(alpha-(1+mu)/q) ||Caputo u||), norms in L_q(t^mu)."""
    _check_hardy(q, mu)
    if not alpha > (1.0 + mu) / q:
        raise ParameterError(f"trace inequality needs alpha > (1+mu)/q, got alpha={alpha}")
    t = _nodes(tgrid)
    T = t[-1]
    u = np.asarray(_check_values(u, t), dtype=float)
    d = caputo_derivative(u, u0, t, alpha)
    nu = weighted_integral(np.abs(u) ** q, t, mu) ** (1.0 / q)
    nd = weighted_integral(np.abs(d) ** q, t, mu, start=1) ** (1.0 / q)
    s = (1.0 + mu) / q
    return float(abs(u0) / (T ** (-s) * nu + T ** (alpha - s) * nd))
