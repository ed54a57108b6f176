"""Shared pieces of the inequality harness: parameters, members, norms, reports."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError
from ..frac_calculus import FracOrder, caputo_derivative, nodal_derivative, rl_derivative
from ..function_spaces import WeightSpec, bessel_multiplier, besov_norm, build_lp_family, mixed_norm
from ..grid import SampledField, SpaceGrid, apply_multiplier, gradient_magnitude, hessian_magnitude


@dataclass(frozen=True)
class HarnessParams:
    alpha: float = 0.75
    k: int = 0
    p: float = 2.0
    q: float = 2.0
    mu: float = 0.0
    nu: float = 0.0

    def validate(self, d: int = 1) -> None:
        # alpha = 1 with k = 0 is the classical heat equation, kept as a reference case
        if not (self.alpha == 1.0 and self.k == 0):
            FracOrder(self.alpha, self.k)
        WeightSpec(self.mu, self.nu).validate(self.p, self.q, d)

    @property
    def beta(self) -> float:
        return self.k + self.alpha

    @property
    def weight(self) -> WeightSpec:
        return WeightSpec(self.mu, self.nu)

    @property
    def critical(self) -> float:
        """(1 + mu) / q."""
        return (1.0 + self.mu) / self.q

    @property
    def has_top_trace(self) -> bool:
        return self.alpha > self.critical

    def theta(self, n: int) -> float:
        """(k + alpha - n - (1+mu)/q) / (k + alpha)."""
        return (self.beta - n - self.critical) / self.beta

    def require_traces(self) -> None:
        if not self.has_top_trace:
            raise ParameterError(
                f"trace estimates need alpha > (1+mu)/q; got alpha={self.alpha}, "
                f"(1+mu)/q={self.critical}")

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "k": self.k, "p": self.p, "q": self.q,
                "mu": self.mu, "nu": self.nu}


@dataclass
class Member:
    """One ensemble field with its initial traces u(0), (du/dt)(0)."""

    field: SampledField
    traces: list
    kind: str
    label: str = ""

    @property
    def du(self):
        return self.field.time_derivative


@dataclass
class InequalityReport:
    name: str
    params: dict
    lhs: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    drift: float | None = None
    extra: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    @property
    def ratios(self) -> np.ndarray:
        lhs = np.asarray(self.lhs, dtype=float)
        rhs = np.asarray(self.rhs, dtype=float)
        out = np.zeros_like(lhs)
        nz = lhs != 0
        out[nz] = lhs[nz] / rhs[nz]
        return out

    @property
    def max_ratio(self) -> float:
        r = self.ratios
        return float(r.max()) if r.size else 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "max_ratio": self.max_ratio,
            "drift": self.drift,
            "entries": [{"label": lab, "lhs": a, "rhs": b, "ratio": r}
                        for lab, a, b, r in zip(self.labels, self.lhs, self.rhs, self.ratios.tolist())],
            "extra": self.extra,
            "checks": self.checks,
            "passed": self.passed,
        }


def lift(values, sgrid: SpaceGrid, s: float = -1.0) -> np.ndarray:
    """(1 - Laplacian)^(s/2) over the trailing spatial axes."""
    return apply_multiplier(values, bessel_multiplier(sgrid, s), sgrid)


def lift_member(m: Member, s: float = -1.0) -> Member:
    sg = m.field.sgrid
    du = None if m.du is None else lift(m.du, sg, s)
    fld = SampledField(sg, m.field.tgrid, lift(m.field.values, sg, s), time_derivative=du)
    return Member(fld, [lift(tr, sg, s) for tr in m.traces], m.kind, m.label)


def fractional_top_derivative(values, top_trace, tgrid, params: HarnessParams) -> np.ndarray:
    """d/dt I^(1-alpha) applied to the k-th time derivative.

    The initial value is removed only when it exists in the trace sense
    (alpha > (1+mu)/q); otherwise the Riemann-Liouville form is used.
    """
    if params.alpha == 1.0:
        return nodal_derivative(values, tgrid)
    if params.has_top_trace:
        return caputo_derivative(values, top_trace, tgrid, params.alpha)
    return rl_derivative(values, tgrid, params.alpha)


def time_derivative(m: Member) -> np.ndarray:
    if m.du is not None:
        return np.asarray(m.du)
    du = nodal_derivative(m.field.values, m.field.tgrid)
    if len(m.traces) > 1:
        du[0] = m.traces[1]
    return du


def solution_space_norm(m: Member, params: HarnessParams, form: str = "nondiv") -> float:
    """Norm of the solution space.

    nondiv: || |u| + |Du| + |D^2 u| + sum_{m=1..k} |d_t^m u| || + || d_t^(k+alpha) u ||
    div:    the nondiv norm of (1 - Laplacian)^(-1/2) u.
    All norms are L_{p,q,w}; the fractional part is integrated from t_1.
    """
    if form == "div":
        return solution_space_norm(lift_member(m), params, "nondiv")
    if form != "nondiv":
        raise ParameterError(f"unknown form {form!r}")
    fld = m.field
    sg, tg = fld.sgrid, fld.tgrid
    u = fld.values
    pointwise = np.abs(u) + gradient_magnitude(u, sg) + hessian_magnitude(u, sg)
    if params.k == 1:
        du = time_derivative(m)
        pointwise = pointwise + np.abs(du)
        top, top_trace = du, m.traces[1]
    else:
        top, top_trace = u, m.traces[0]
    frac = fractional_top_derivative(top, top_trace, tg, params)
    frac[0] = 0.0
    a = mixed_norm(pointwise, tg, sg, params.p, params.q, params.weight)
    b = mixed_norm(frac, tg, sg, params.p, params.q, params.weight, start=1)
    return a + b


def besov_of(f, s: float, params: HarnessParams, sgrid: SpaceGrid) -> float:
    return besov_norm(f, s, params.p, params.q, build_lp_family(sgrid), params.nu)


def log_drift(coarse: float, fine: float) -> float:
    if coarse <= 0 or fine <= 0:
        return math.inf
    return abs(math.log(fine / coarse))


def default_workers() -> int:
    return os.cpu_count() or 1


def parallel_map(fn, items, workers: int | None = None) -> list:
    """fn over items on a thread pool; results keep the input order."""
    items = list(items)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
