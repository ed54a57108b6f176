"""Deterministic test ensembles.

Random draws never depend on the grid resolution, so the same seed yields the
same continuum fields on a coarse and a refined grid.  That is what makes the
refinement drift of a max ratio meaningful.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from ..errors import ParameterError
from ..function_spaces import lp_norm
from ..grid import SampledField, SpaceGrid, TimeGrid
from ..ivp_solver import IVPProblem, solve
from .common import HarnessParams, Member

KINDS = ("separable-monomial", "random-bandlimited", "solver-output")


def band_modes(L: float, d: int, band: tuple[float, float]) -> list[tuple[int, ...]]:
    """Integer modes m, one per +-m pair, with band[0] <= pi |m| / L <= band[1]."""
    top = int(math.floor(band[1] * L / math.pi))
    out = []
    for m in itertools.product(range(-top, top + 1), repeat=d):
        nz = [c for c in m if c != 0]
        if not nz or nz[0] < 0:
            continue
        r = math.pi / L * math.sqrt(sum(c * c for c in m))
        if band[0] <= r <= band[1]:
            out.append(m)
    return out


def bandlimited(sgrid: SpaceGrid, modes, coefs) -> np.ndarray:
    """sum_m 2 Re(c_m exp(i pi m.x / L)), unit L_2 norm."""
    if not modes:
        raise ParameterError("no lattice modes inside the band")
    spec = np.zeros(sgrid.shape, dtype=complex)
    for m, c in zip(modes, coefs):
        if max(abs(v) for v in m) >= sgrid.n // 2:
            raise ParameterError(f"mode {m} is not resolved by n={sgrid.n}")
        # grid points start at -L, so exp(i pi m x / L) picks up (-1)^|m|
        sign = (-1.0) ** sum(m)
        idx = tuple(v % sgrid.n for v in m)
        spec[idx] += c * sign
        idx_neg = tuple((-v) % sgrid.n for v in m)
        spec[idx_neg] += np.conj(c) * sign
    f = np.fft.ifftn(spec).real * sgrid.size
    return f / float(lp_norm(f, sgrid, 2.0))


def _draw_band(rng, sgrid, band):
    modes = band_modes(sgrid.L, sgrid.d, band)
    coefs = rng.standard_normal(len(modes)) + 1j * rng.standard_normal(len(modes))
    return bandlimited(sgrid, modes, coefs)


def _draw_bump(rng, sgrid):
    x0 = rng.uniform(-2.0, 2.0, size=sgrid.d)
    width = rng.uniform(0.5, 1.5)
    amp = rng.uniform(0.5, 2.0)
    r2 = sum((c - a) ** 2 for c, a in zip(sgrid.coords(), x0))
    return amp * np.exp(-r2 / (2.0 * width**2))


def _gamma_floor(params: HarnessParams) -> float:
    """Smallest time exponent keeping d_t^(k+alpha) t^gamma in L_{q,mu}."""
    return max(params.beta - params.critical, params.k)


def _separable(rng, sgrid, tgrid, params, label):
    phi = _draw_bump(rng, sgrid)
    gamma = rng.uniform(_gamma_floor(params) + 0.1, _gamma_floor(params) + 1.5)
    c = rng.uniform(0.5, 1.5)
    a = rng.uniform(-1.0, 1.0) if params.k == 1 else 0.0
    t = tgrid.t[:, None]
    shp = (-1,) + (1,) * sgrid.d
    g = 1.0 + a * t + c * t**gamma
    vals = g.reshape(shp) * phi[None]
    dv = None
    if params.k == 1:
        # gamma > 1 here, so the derivative vanishes at t = 0
        dv = (a + c * gamma * t ** (gamma - 1.0)).reshape(shp) * phi[None]
    fld = SampledField(sgrid, tgrid, vals, time_derivative=dv)
    traces = [phi] if params.k == 0 else [phi, a * phi]
    return Member(fld, traces, "separable-monomial", label)


def _bandlimited_member(rng, sgrid, tgrid, params, label, band):
    f0 = _draw_band(rng, sgrid, band)
    f1 = _draw_band(rng, sgrid, band)
    gamma = rng.uniform(_gamma_floor(params) + 0.1, _gamma_floor(params) + 1.5)
    shp = (-1,) + (1,) * sgrid.d
    t = tgrid.t.reshape(shp)
    vals = f0[None] + t**gamma * f1[None]
    traces = [f0]
    dv = None
    if params.k == 1:
        f2 = _draw_band(rng, sgrid, band)
        vals = vals + t * f2[None]
        dv = gamma * t ** (gamma - 1.0) * f1[None] + f2[None]
        traces.append(f2)
    fld = SampledField(sgrid, tgrid, vals, time_derivative=dv)
    return Member(fld, traces, "random-bandlimited", label)


def _solver_member(rng, sgrid, tgrid, params, label, band):
    u0 = _draw_band(rng, sgrid, band) if rng.uniform() < 0.5 else _draw_bump(rng, sgrid)
    u1 = None
    if params.k == 1:
        u1 = _draw_band(rng, sgrid, band) if rng.uniform() < 0.5 else _draw_bump(rng, sgrid)
    fld = solve(IVPProblem(params.alpha, u0, sgrid, tgrid, params.k, u1))
    traces = [u0] if params.k == 0 else [u0, u1]
    return Member(fld, traces, "solver-output", label)


def ensemble_generate(kind: str, count: int, seed: int, sgrid: SpaceGrid, tgrid: TimeGrid,
                      params: HarnessParams, band: tuple[float, float] = (1.0, 4.0)) -> list[Member]:
    """``count`` members of one kind, or cycling through all kinds for "mixed"."""
    if kind != "mixed" and kind not in KINDS:
        raise ParameterError(f"unknown ensemble kind {kind!r}")
    if count < 0:
        raise ParameterError("count must be non-negative")
    children = np.random.SeedSequence(seed).spawn(count)
    out = []
    for i, ss in enumerate(children):
        rng = np.random.default_rng(ss)
        kd = KINDS[i % len(KINDS)] if kind == "mixed" else kind
        label = f"{kd}#{i}"
        if kd == "separable-monomial":
            out.append(_separable(rng, sgrid, tgrid, params, label))
        elif kd == "random-bandlimited":
            out.append(_bandlimited_member(rng, sgrid, tgrid, params, label, band))
        else:
            out.append(_solver_member(rng, sgrid, tgrid, params, label, band))
    return out


def initial_data(count: int, seed: int, sgrid: SpaceGrid, band: tuple[float, float] = (1.0, 4.0),
                 with_velocity: bool = False) -> list[tuple[np.ndarray, np.ndarray | None]]:
    """Pairs (u0, u1) alternating band-limited fields and bumps."""
    children = np.random.SeedSequence(seed).spawn(count)
    out = []
    for i, ss in enumerate(children):
        rng = np.random.default_rng(ss)
        draw = (lambda: _draw_band(rng, sgrid, band)) if i % 2 == 0 else (lambda: _draw_bump(rng, sgrid))
        u0 = draw()
        u1 = draw() if with_velocity else None
        out.append((u0, u1))
    return out
