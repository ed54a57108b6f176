"""Initial-trace estimates and the mollifier decomposition behind them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..frac_calculus import caputo_higher, rl_integral
from ..function_spaces import lp_norm
from ..quadrature import gauss_legendre
from .common import (HarnessParams, InequalityReport, Member, besov_of, lift_member, log_drift,
                     parallel_map, solution_space_norm, time_derivative)


def _bump(y):
    """exp(-1/(1-y^2)) on |y| < 1 and its derivative."""
    y = np.asarray(y, dtype=float)
    inside = np.abs(y) < 1.0
    val = np.zeros_like(y)
    der = np.zeros_like(y)
    yi = y[inside]
    e = np.exp(-1.0 / (1.0 - yi**2))
    val[inside] = e
    der[inside] = e * (-2.0 * yi / (1.0 - yi**2) ** 2)
    return val, der


@dataclass(frozen=True)
class MollifierSpec:
    """eta supported in (-1, -1/2) with unit integral, zeta(t) = -t eta(t)."""

    nodes: int = 64

    @property
    def scale(self) -> float:
        # the bump lives on y = 4t + 3 in (-1, 1), so dt = dy / 4
        x, w = gauss_legendre(200)
        y = 2.0 * x - 1.0
        return 1.0 / (0.5 * float(np.sum(w * _bump(y)[0])))

    def eta(self, t):
        return self.scale * _bump(4.0 * np.asarray(t, dtype=float) + 3.0)[0]

    def eta_prime(self, t):
        return self.scale * 4.0 * _bump(4.0 * np.asarray(t, dtype=float) + 3.0)[1]

    def zeta(self, t):
        t = np.asarray(t, dtype=float)
        return -t * self.eta(t)

    def zeta_prime(self, t):
        t = np.asarray(t, dtype=float)
        return -self.eta(t) - t * self.eta_prime(t)

    def sigma_rule(self):
        """Gauss nodes on [1/2, 1] in sigma = -t."""
        x, w = gauss_legendre(self.nodes)
        return 0.5 + 0.5 * x, 0.5 * w


def _interp_time(values, tgrid_t, s):
    """Piecewise-linear interpolation in time; constant continuation past T."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, tgrid_t[-1])
    idx = np.clip(np.searchsorted(tgrid_t, s, side="right"), 1, tgrid_t.size - 1)
    t0, t1 = tgrid_t[idx - 1], tgrid_t[idx]
    w = ((s - t0) / (t1 - t0)).reshape((-1,) + (1,) * (values.ndim - 1))
    return values[idx - 1] * (1.0 - w) + values[idx] * w


def _check_order(params: HarnessParams, n: int) -> None:
    if not 0 <= n <= params.k:
        raise ParameterError(f"trace order n must lie in 0..k, got n={n}, k={params.k}")


def _trace(m: Member, n: int):
    if n >= len(m.traces):
        raise ParameterError(f"member is missing the trace of order {n}")
    return np.asarray(m.traces[n])


def _nth_derivative(m: Member, n: int) -> np.ndarray:
    return np.asarray(m.field.values) if n == 0 else time_derivative(m)


def _potential(m: Member, params: HarnessParams, n: int) -> np.ndarray:
    """I^alpha I^(k-n) f + R_n on the time grid, f the fractional derivative of order k + alpha."""
    tg = m.field.tgrid
    traces = list(m.traces[: params.k + 1])
    du = m.du if params.k == 1 else None
    f = caputo_higher(m.field.values, traces, tg, params.alpha, params.k, du=du)
    f[0] = f[1]
    g = rl_integral(f, tg, params.alpha)
    if params.k - n == 1:
        g = rl_integral(g, tg, 1.0)
        tt = tg.t.reshape((-1,) + (1,) * (g.ndim - 1))
        g = g + tt * _trace(m, 1)[None]
    return g


def trace_decomposition(m: Member, params: HarnessParams, eps: float, n: int | None = None,
                        spec: MollifierSpec = MollifierSpec(), outer_panels: int = 48,
                        outer_nodes: int = 16):
    """(U_{n,0}, U_{n,1}) with U_{n,0} + U_{n,1} = d_t^n u(0, .).

    U_{n,1} = int eta_eps(-s) d_t^n u(s) ds and
    U_{n,0} = -(1/beta) int_0^eps lam^-1 int_{1/2}^1 G(sigma lam^(1/beta)) zeta'(-sigma) dsigma dlam,
    G = I^alpha I^(k-n) f + R_n.  The lam integral runs in log lam down to
    the first time node, below which G is linear and the tail is closed form.
    """
    n = params.k if n is None else n
    _check_order(params, n)
    tg = m.field.tgrid
    beta = params.beta
    if not 0.0 < eps < tg.T**beta:
        raise ParameterError(f"eps must lie in (0, T^beta) = (0, {tg.T**beta:g}), got {eps}")
    t = tg.t
    sig, wsig = spec.sigma_rule()
    reach = eps ** (1.0 / beta)
    eta_w = wsig * spec.eta(-sig)
    dn = _nth_derivative(m, n)
    u1 = np.tensordot(eta_w, _interp_time(dn, t, sig * reach), axes=1)

    g = _potential(m, params, n)
    zw = wsig * spec.zeta_prime(-sig)
    tau_hi = math.log(eps)
    tau_lo = beta * math.log(t[1])
    inner = np.zeros(m.field.sgrid.shape)
    if tau_lo < tau_hi:
        x, w = gauss_legendre(outer_nodes)
        edges = np.linspace(tau_lo, tau_hi, outer_panels + 1)
        taus = (edges[:-1, None] + np.diff(edges)[:, None] * x[None]).ravel()
        wts = (np.diff(edges)[:, None] * w[None]).ravel()
        lam_r = np.exp(taus / beta)
        s = np.multiply.outer(lam_r, sig).ravel()
        gs = _interp_time(g, t, s).reshape((taus.size, sig.size) + g.shape[1:])
        jl = np.tensordot(gs, zw, axes=([1], [0]))
        inner = np.tensordot(wts, jl, axes=1)
        lam_low = math.exp(tau_lo)
    else:
        lam_low = eps
    # below lam_low the samples s < t_1 see the chord G(t) = G(t_1) t / t_1 (G(0) = 0)
    slope = g[1] / t[1]
    tail = beta * lam_low ** (1.0 / beta) * float(np.sum(zw * sig)) * slope
    u0 = -(inner + tail) / beta
    return u0, u1


def decomposition_error(m: Member, params: HarnessParams, eps: float, n: int | None = None,
                        p: float | None = None, **kw) -> float:
    """||d_t^n u(0) - U_{n,0} - U_{n,1}||_p / ||d_t^n u(0)||_p."""
    n = params.k if n is None else n
    p = params.p if p is None else p
    u0, u1 = trace_decomposition(m, params, eps, n, **kw)
    tr = _trace(m, n)
    sg = m.field.sgrid
    den = float(lp_norm(tr, sg, p, params.nu))
    num = float(lp_norm(tr - u0 - u1, sg, p, params.nu))
    return num / den if den > 0 else num


def _ratios(members, params: HarnessParams, orders, form: str, workers=None):
    def one(item):
        i, m = item
        mm = lift_member(m) if form == "div" else m
        sol = solution_space_norm(mm, params, "nondiv")
        return [(besov_of(_trace(mm, n), 2.0 * params.theta(n), params, mm.field.sgrid), sol,
                 f"{m.label or i}:n={n}") for n in orders]

    rows = [r for block in parallel_map(one, enumerate(members), workers) for r in block]
    return [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows]


def _keep_nonzero(lhs, rhs, labels):
    keep = [i for i, (a, b) in enumerate(zip(lhs, rhs)) if a > 0 and b > 0]
    return [lhs[i] for i in keep], [rhs[i] for i in keep], [labels[i] for i in keep]


def trace_constant(params: HarnessParams, members, fine_members=None, orders=None,
                   form: str = "nondiv", drift_bound: float = 0.5, name: str = "trace",
                   workers: int | None = None) -> InequalityReport:
    """Ratios ||d_t^n u(0)||_{B^(2 theta_n)} / ||u||, with drift against a refined ensemble.

    form="div" applies (1 - Laplacian)^(-1/2) to every member first, which
    turns the divergence-form estimate (Besov index 2 theta_n - 1) into the
    non-divergence one.
    """
    params.require_traces()
    orders = list(range(params.k + 1)) if orders is None else list(orders)
    for n in orders:
        _check_order(params, n)
    lhs, rhs, labels = _keep_nonzero(*_ratios(members, params, orders, form, workers))
    rep = InequalityReport(name, params.as_dict(), lhs, rhs, labels)
    rep.extra["theta"] = {str(n): params.theta(n) for n in orders}
    rep.extra["form"] = form
    rep.checks["finite"] = bool(np.all(np.isfinite(rep.ratios)))
    if fine_members is not None:
        fl, fr, _ = _keep_nonzero(*_ratios(fine_members, params, orders, form, workers))
        fine = InequalityReport(name, params.as_dict(), fl, fr)
        rep.drift = log_drift(rep.max_ratio, fine.max_ratio)
        rep.extra["max_ratio_fine"] = fine.max_ratio
        rep.checks["drift"] = rep.drift <= drift_bound
    return rep


def trace_constant_div(params: HarnessParams, members, fine_members=None, orders=None,
                       drift_bound: float = 0.5, workers: int | None = None) -> InequalityReport:
    return trace_constant(params, members, fine_members, orders, "div", drift_bound, "trace-div", workers)
