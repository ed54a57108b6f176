"""Below the critical order alpha <= (1+mu)/q: why no Besov trace estimate can hold."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ParameterError
from ..frac_calculus import rl_derivative
from ..function_spaces import lp_norm, mixed_norm
from ..grid import SampledField, SpaceGrid, TimeGrid
from ..ivp_solver import IVPProblem, solve
from .common import HarnessParams, InequalityReport, Member, besov_of, solution_space_norm


def _require_subcritical(params: HarnessParams) -> None:
    if params.k != 0:
        raise ParameterError("the sub-critical constructions use k = 0")
    if params.alpha >= params.critical:
        raise ParameterError(
            f"needs alpha < (1+mu)/q, got alpha={params.alpha}, (1+mu)/q={params.critical}; "
            "above the threshold the trace estimate holds")


def subcritical_counterexample(params: HarnessParams, phi, sgrid: SpaceGrid, tgrid: TimeGrid,
                               ns=(1, 2, 4, 8, 16, 32, 64), growth: float = 10.0) -> InequalityReport:
    """u_n = phi and v_n = t^(1/n) phi share nothing at t = 0 but merge in the solution norm.

    For each n: lhs = ||(u_n - v_n)(0)||_p = ||phi||_p, rhs = ||u_n - v_n|| in the
    solution space (Riemann-Liouville form, no trace subtracted).  The extra
    entry "frac_norms" holds ||d_t^alpha (u_n - v_n)||_{L_{p,q,w}}.
    """
    _require_subcritical(params)
    phi = np.asarray(phi, dtype=float)
    if phi.shape != sgrid.shape:
        raise ParameterError("phi does not match the grid")
    shp = (-1,) + (1,) * sgrid.d
    t = tgrid.t.reshape(shp)
    pn = float(lp_norm(phi, sgrid, params.p, params.nu))
    lhs, rhs, labels, frac = [], [], [], []
    for n in ns:
        w = (1.0 - t ** (1.0 / n)) * phi[None]
        m = Member(SampledField(sgrid, tgrid, w), [phi], "counterexample", f"n={n}")
        rhs.append(solution_space_norm(m, params))
        lhs.append(pn)
        labels.append(f"n={n}")
        d = rl_derivative(w, tgrid, params.alpha)
        d[0] = 0.0
        frac.append(mixed_norm(d, tgrid, sgrid, params.p, params.q, params.weight, start=1))
    rep = InequalityReport("counterexample", params.as_dict(), lhs, rhs, labels)
    r = rep.ratios
    rep.extra["frac_norms"] = frac
    rep.extra["growth"] = float(r[-1] / r[0])
    rep.checks["growth"] = rep.extra["growth"] >= growth
    rep.checks["frac_decreasing"] = bool(np.all(np.diff(frac) <= 0))
    return rep


def single_shell(sgrid: SpaceGrid, j: int) -> np.ndarray:
    """cos(2^j x_1); needs L = pi so that 2^j is a lattice frequency."""
    if abs(sgrid.L - math.pi) > 1e-12:
        raise ParameterError("single-shell data need the torus half-width L = pi")
    if 2**j >= sgrid.n // 2:
        raise ParameterError(f"level {j} is not resolved by n={sgrid.n}")
    return np.cos(2.0**j * sgrid.coords()[0])


def besov_necessity(params: HarnessParams, sgrid: SpaceGrid, levels=range(0, 7),
                    tgrid: TimeGrid | None = None, rel_tol: float = 0.05) -> InequalityReport:
    """||u0||_p / ||u0||_{B^(2 theta)} for u0 = cos(2^j x), theta = 1 - (1+mu)/(q alpha).

    A single shell at level j gives exactly 2^(-2 theta j), so for theta < 0
    no bound of the L_p norm by the Besov norm exists.  With a time grid the
    solver-based ratio ||U|| / ||u0||_{B^(2 theta)} is reported as well; its
    growth approaches the same factor once the L_p part of the solution norm
    dominates.
    """
    if params.k != 0:
        raise ParameterError("besov_necessity uses k = 0")
    theta = 1.0 - params.critical / params.alpha
    levels = [int(j) for j in levels]
    lhs, rhs, labels, sol = [], [], [], []
    for j in levels:
        u0 = single_shell(sgrid, j)
        b = besov_of(u0, 2.0 * theta, params, sgrid)
        lhs.append(float(lp_norm(u0, sgrid, params.p, params.nu)))
        rhs.append(b)
        labels.append(f"j={j}")
        if tgrid is not None:
            fld = solve(IVPProblem(params.alpha, u0, sgrid, tgrid))
            sol.append(solution_space_norm(Member(fld, [u0], "solver-output"), params) / b)
    rep = InequalityReport("necessity", params.as_dict(), lhs, rhs, labels)
    r = rep.ratios
    expected = 2.0 ** (-2.0 * theta)
    per_level = (r[1:] / r[:-1]).tolist()
    rep.extra.update({"theta": theta, "expected_growth": expected, "growth": per_level})
    if sol:
        rep.extra["solution_ratios"] = sol
        rep.extra["solution_growth"] = (np.asarray(sol[1:]) / np.asarray(sol[:-1])).tolist()
    rep.checks["growth"] = bool(np.all(np.abs(np.asarray(per_level) / expected - 1.0) <= rel_tol))
    return rep
