"""Extension estimates, the mixed-norm kernel bound and dyadic decay envelopes."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ParameterError
from ..function_spaces import build_lp_family, lp_norm, mixed_norm
from ..fundamental_solution import kernel_hat, kernel_tilde_hat
from ..grid import SpaceGrid, TimeGrid, frequency_lattice
from ..ivp_solver import IVPProblem, solve, symbol_table
from .common import (HarnessParams, InequalityReport, Member, besov_of, log_drift, parallel_map,
                     solution_space_norm)


def _require_extension(params: HarnessParams) -> None:
    for n in range(params.k + 1):
        th = params.theta(n)
        if not 0.0 < th < 1.0:
            raise ParameterError(
                f"extension needs theta_{n} in (0, 1), got {th:.6g}; this requires alpha > (1+mu)/q")


def _extension_rows(params, data, sgrid, tgrid, form, workers):
    def one(item):
        i, (u0, u1) = item
        if params.k == 1 and u1 is None:
            raise ParameterError("k = 1 extension needs the velocity datum u1")
        fld = solve(IVPProblem(params.alpha, u0, sgrid, tgrid, params.k, u1))
        traces = [u0] if params.k == 0 else [u0, u1]
        sol = solution_space_norm(Member(fld, traces, "solver-output"), params, form)
        shift = -1.0 if form == "div" else 0.0
        rhs = sum(besov_of(tr, 2.0 * params.theta(n) + shift, params, sgrid)
                  for n, tr in enumerate(traces))
        return sol, rhs, f"data#{i}"

    return parallel_map(one, enumerate(data), workers)


def extension_constant(params: HarnessParams, data, sgrid: SpaceGrid, tgrid: TimeGrid,
                       fine: tuple | None = None, form: str = "nondiv", drift_bound: float = 0.5,
                       workers: int | None = None) -> InequalityReport:
    """Ratios ||U|| / (sum_n ||d_t^n u(0)||_{B^(2 theta_n)}) for solver outputs U.

    ``data`` is a list of (u0, u1) pairs (u1 None for k = 0).  ``fine`` is an
    optional (data, sgrid, tgrid) triple on a refined grid for the drift.
    In divergence form both Besov indices drop by one.
    """
    _require_extension(params)
    rows = [r for r in _extension_rows(params, data, sgrid, tgrid, form, workers) if r[1] > 0]
    rep = InequalityReport("extension", params.as_dict(), [r[0] for r in rows], [r[1] for r in rows],
                           [r[2] for r in rows])
    rep.extra["theta"] = {str(n): params.theta(n) for n in range(params.k + 1)}
    rep.extra["form"] = form
    rep.checks["finite"] = bool(np.all(np.isfinite(rep.ratios)))
    if fine is not None:
        fdata, fsg, ftg = fine
        frows = [r for r in _extension_rows(params, fdata, fsg, ftg, form, workers) if r[1] > 0]
        fmax = max((a / b for a, b, _ in frows), default=0.0)
        rep.drift = log_drift(rep.max_ratio, fmax)
        rep.extra["max_ratio_fine"] = fmax
        rep.checks["drift"] = rep.drift <= drift_bound
    return rep


def kernel_convolution(beta: float, f, sgrid: SpaceGrid, tgrid: TimeGrid) -> np.ndarray:
    """P_beta(t) * f at every node of tgrid, computed spectrally."""
    tab = symbol_table(beta, 1.0, tgrid, sgrid)
    fh = np.fft.fftn(np.asarray(f, dtype=float))
    ax = tuple(range(1, sgrid.d + 1))
    return np.fft.ifftn(tab * fh[None], axes=ax).real


def mixed_kernel_constant(params: HarnessParams, fields, sgrid: SpaceGrid, tgrid: TimeGrid,
                          workers: int | None = None) -> InequalityReport:
    """Ratios ||P_alpha * f||_{L_{p,q,w}} / ||f||_{B^s} with s = -2(1+mu)/(q alpha)."""
    if params.k != 0:
        raise ParameterError("the mixed kernel bound is stated for k = 0")
    params.require_traces()
    s = -2.0 * params.critical / params.alpha

    def one(item):
        i, f = item
        u = kernel_convolution(params.alpha, f, sgrid, tgrid)
        lhs = mixed_norm(u, tgrid, sgrid, params.p, params.q, params.weight)
        return lhs, besov_of(f, s, params, sgrid), f"field#{i}"

    rows = [r for r in parallel_map(one, enumerate(fields), workers) if r[1] > 0]
    rep = InequalityReport("mixed-kernel", params.as_dict(), [r[0] for r in rows],
                           [r[1] for r in rows], [r[2] for r in rows])
    rep.extra["besov_index"] = s
    rep.checks["finite"] = bool(np.all(np.isfinite(rep.ratios)))
    return rep


def _kappa_range(beta: float, tilde: bool) -> tuple[float, float]:
    if tilde:
        if not 1.0 < beta < 2.0:
            raise ParameterError(f"the second kernel needs beta in (1, 2), got {beta}")
        return 0.0, beta - 1.0
    if not 0.0 < beta < 2.0:
        raise ParameterError(f"beta must lie in (0, 2), got {beta}")
    return 0.0, beta


def decay_envelope(beta: float, kappa: float, j, t, tilde: bool = False):
    """2^(-2 kappa j / beta) t^(-kappa) ^ 1, or 2^(-2j/beta) 2^(-2 kappa j/beta) t^(-kappa) ^ t."""
    j = np.asarray(j, dtype=float)
    t = np.asarray(t, dtype=float)
    core = 2.0 ** (-2.0 * kappa * j / beta) * t ** (-kappa)
    if tilde:
        return np.minimum(2.0 ** (-2.0 * j / beta) * core, t)
    return np.minimum(core, 1.0)


def _pooled_slope(logt: np.ndarray, logm: np.ndarray, groups: np.ndarray) -> float:
    """Common slope of logm on logt with a separate intercept for each group."""
    xs, ys = [], []
    for g in np.unique(groups):
        sel = groups == g
        if sel.sum() < 2:
            continue
        xs.append(logt[sel] - logt[sel].mean())
        ys.append(logm[sel] - logm[sel].mean())
    if not xs:
        return math.nan
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    return float(np.dot(x, y) / np.dot(x, x))


def kernel_decay_envelope(beta: float, kappa: float, f, sgrid: SpaceGrid, js=range(1, 7),
                          ts=None, p: float = 2.0, nu: float = 0.0, tilde: bool = False,
                          slope_tol: float = 0.1) -> InequalityReport:
    """Measure ||(P * psi_j) * f (t)||_{L_p,w} over a (j, t) lattice against the envelope.

    N is the smallest constant with measurement <= N envelope ||f|| everywhere.
    The large-t slope is a pooled regression over the points t >= 2^(-2j/beta).
    """
    lo, hi = _kappa_range(beta, tilde)
    if not lo < kappa < hi:
        raise ParameterError(f"kappa must lie in ({lo:g}, {hi:g}), got {kappa}")
    js = [int(j) for j in js]
    ts = np.asarray([2.0**e for e in range(-8, 3)] if ts is None else ts, dtype=float)
    if np.any(ts <= 0):
        raise ParameterError("times must be positive")
    fam = build_lp_family(sgrid)
    if max(js) > fam.J:
        raise ParameterError(f"level {max(js)} exceeds the resolved level {fam.J} of the grid")
    xi2 = frequency_lattice(sgrid)
    fh = np.fft.fftn(np.asarray(f, dtype=float))
    fnorm = float(lp_norm(f, sgrid, p, nu))
    if fnorm == 0:
        raise ParameterError("f must be non-zero")
    sym = kernel_tilde_hat(beta, ts, xi2) if tilde else kernel_hat(beta, ts, xi2)
    lhs, rhs, labels, jj, tt = [], [], [], [], []
    ax = tuple(range(1, sgrid.d + 1))
    for j in js:
        piece = np.fft.ifftn(sym * (fam.shells[j - 1] * fh)[None], axes=ax).real
        meas = lp_norm(piece, sgrid, p, nu)
        env = decay_envelope(beta, kappa, j, ts, tilde) * fnorm
        for ti, m, e in zip(ts, meas, env):
            lhs.append(float(m))
            rhs.append(float(e))
            labels.append(f"j={j},t={ti:.17g}")
            jj.append(j)
            tt.append(ti)
    jj = np.asarray(jj)
    tt = np.asarray(tt)
    meas = np.asarray(lhs)
    rep = InequalityReport("decay", {"beta": beta, "kappa": kappa, "p": p, "nu": nu, "tilde": tilde},
                           lhs, rhs, labels)
    big = (tt >= 2.0 ** (-2.0 * jj / beta)) & (meas > 0)
    slope = _pooled_slope(np.log(tt[big]), np.log(meas[big]), jj[big])
    target = -kappa
    n_fit = rep.max_ratio
    small = ~big
    rep.extra.update({
        "N": n_fit,
        "slope": slope,
        "target_slope": target,
        "per_level_slope": {str(j): _pooled_slope(np.log(tt[big & (jj == j)]),
                                                  np.log(meas[big & (jj == j)]),
                                                  jj[big & (jj == j)]) for j in js},
        "small_t_max_over_norm": float(np.max(meas[small]) / fnorm) if small.any() else None,
    })
    rep.checks["envelope"] = bool(np.all(meas <= n_fit * np.asarray(rhs) * (1 + 1e-12)))
    rep.checks["slope"] = bool(abs(slope - target) <= slope_tol)
    return rep
