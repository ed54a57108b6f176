"""Closed-form spectral solution of the Cauchy problem on the torus.

For k = 0 the solution is U_hat = E_alpha(-|xi|^2 t^alpha) u0_hat; for k = 1 it
adds t E_{beta,2}(-|xi|^2 t^beta) u1_hat with beta = 1 + alpha.  Time is only
sampled, never stepped, so the residual of the discrete Caputo derivative
measures the error of the time-fractional calculus alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError
from .frac_calculus import caputo_higher
from .function_spaces import WeightSpec, lp_norm, mixed_norm
from .grid import SampledField, SpaceGrid, TimeGrid, apply_multiplier, frequency_lattice
from .mittag_leffler import ml_eval_array


@dataclass
class IVPProblem:
    alpha: float
    u0: np.ndarray
    sgrid: SpaceGrid
    tgrid: TimeGrid
    k: int = 0
    u1: np.ndarray | None = None

    def __post_init__(self):
        if self.k not in (0, 1):
            raise ParameterError(f"k must be 0 or 1, got {self.k}")
        upper_ok = self.alpha <= 1.0 if self.k == 0 else self.alpha < 1.0
        if not (0.0 < self.alpha and upper_ok):
            raise ParameterError(f"alpha={self.alpha} outside the admissible range for k={self.k}")
        self.u0 = np.asarray(self.u0, dtype=float)
        if self.u0.shape != self.sgrid.shape:
            raise ParameterError(f"u0 has shape {self.u0.shape}, grid is {self.sgrid.shape}")
        if self.k == 1:
            if self.u1 is None:
                raise ParameterError("super-diffusion (k = 1) needs the initial velocity u1")
            self.u1 = np.asarray(self.u1, dtype=float)
            if self.u1.shape != self.sgrid.shape:
                raise ParameterError("u1 shape does not match the grid")

    @property
    def beta(self) -> float:
        return self.k + self.alpha


@lru_cache(maxsize=16)
def symbol_table(beta: float, c: float, tgrid: TimeGrid, sgrid: SpaceGrid) -> np.ndarray:
    """E_{beta,c}(-|xi|^2 t_i^beta) for every node, shape (M+1, n, ..., n)."""
    xi2 = frequency_lattice(sgrid)
    v = np.multiply.outer(tgrid.t**beta, xi2)
    out = ml_eval_array(beta, c, v)
    out.setflags(write=False)
    return out


def _evolve(table: np.ndarray, f: np.ndarray, sgrid: SpaceGrid) -> np.ndarray:
    ax = tuple(range(1, sgrid.d + 1))
    fh = np.fft.fftn(f)
    return np.fft.ifftn(table * fh[None], axes=ax).real


def solve_subdiffusion(prob: IVPProblem) -> SampledField:
    if prob.k != 0:
        raise ParameterError("solve_subdiffusion expects k = 0")
    tab = symbol_table(prob.alpha, 1.0, prob.tgrid, prob.sgrid)
    vals = _evolve(tab, prob.u0, prob.sgrid)
    vals[0] = prob.u0
    return SampledField(prob.sgrid, prob.tgrid, vals)


def solve_superdiffusion(prob: IVPProblem) -> SampledField:
    """U and its exact time derivative.

    d/dt E_b(-l t^b) = -l t^(b-1) E_{b,b}(-l t^b) and d/dt [t E_{b,2}(-l t^b)] = E_b(-l t^b).
    """
    if prob.k != 1:
        raise ParameterError("solve_superdiffusion expects k = 1")
    if prob.u1 is None:
        raise ParameterError("super-diffusion (k = 1) needs the initial velocity u1")
    beta = prob.beta
    sg, tg = prob.sgrid, prob.tgrid
    e1 = symbol_table(beta, 1.0, tg, sg)
    e2 = symbol_table(beta, 2.0, tg, sg)
    ebb = symbol_table(beta, beta, tg, sg)
    tt = tg.t.reshape((-1,) + (1,) * sg.d)
    xi2 = frequency_lattice(sg)
    vals = _evolve(e1, prob.u0, sg) + _evolve(tt * e2, prob.u1, sg)
    vals[0] = prob.u0
    dvals = _evolve(-xi2[None] * tt ** (beta - 1.0) * ebb, prob.u0, sg) + _evolve(e1, prob.u1, sg)
    dvals[0] = prob.u1
    return SampledField(sg, tg, vals, time_derivative=dvals)


def solve(prob: IVPProblem) -> SampledField:
    return solve_subdiffusion(prob) if prob.k == 0 else solve_superdiffusion(prob)


def spectral_laplacian(f, sgrid: SpaceGrid) -> np.ndarray:
    return apply_multiplier(f, -frequency_lattice(sgrid), sgrid)


def residual(U: SampledField, prob: IVPProblem, p: float = 2.0, q: float = 2.0,
             weight: WeightSpec = WeightSpec()) -> float:
    """||D_t^(k+alpha) U - Laplacian U||_{L_{p,q,w}} / ||Laplacian u0||_{L_p(w2)} over [t_2, T]."""
    if not prob.alpha < 1.0:
        raise ParameterError("the residual needs a fractional order alpha < 1")
    traces = [prob.u0] if prob.k == 0 else [prob.u0, prob.u1]
    d = caputo_higher(U.values, traces, U.tgrid, prob.alpha, prob.k, du=U.time_derivative)
    lap = spectral_laplacian(U.values, U.sgrid)
    res = d - lap
    res[:2] = 0.0
    num = mixed_norm(res, U.tgrid, U.sgrid, p, q, weight, start=2)
    den = float(lp_norm(spectral_laplacian(prob.u0, U.sgrid), U.sgrid, p, weight.nu))
    return num / den


@dataclass
class ContinuityFit:
    slope: float
    lower_bound: float
    passed: bool
    trivial: bool


def initial_continuity(U: SampledField, u0, alpha: float, p: float = 2.0, q: float = 2.0,
                       mu: float = 0.0, nu: float = 0.0, window: float = 0.25,
                       slack: float = 0.1) -> ContinuityFit:
    """Slope of log ||U(t) - u0||_p against log t on [t_1, window T].

    Nodes are weighted by their spacing in log t so that the fit is not
    dominated by the densely sampled end of the window.
    """
    t = U.tgrid.t
    sel = np.nonzero((t > 0) & (t <= window * t[-1]))[0]
    dist = lp_norm(U.values[sel] - np.asarray(u0), U.sgrid, p, nu)
    bound = alpha - (1.0 + mu) / q - slack
    if np.all(dist <= 1e-300):
        return ContinuityFit(math.inf, bound, True, True)
    keep = dist > 0
    x = np.log(t[sel][keep])
    y = np.log(dist[keep])
    w = np.gradient(x) if x.size > 1 else np.ones_like(x)
    slope = float(np.polyfit(x, y, 1, w=np.sqrt(np.abs(w)))[0])
    return ContinuityFit(slope, bound, slope >= bound, False)


def preset(name: str, sgrid: SpaceGrid, mode: int = 1, seed: int = 0,
           band: tuple[float, float] = (1.0, 4.0)) -> np.ndarray:
    """Initial data: "gaussian", "single-mode" or "random-bandlimited"."""
    coords = sgrid.coords()
    if name == "gaussian":
        return np.exp(-sum(c**2 for c in coords))
    if name == "single-mode":
        return np.cos(mode * math.pi / sgrid.L * coords[0])
    if name == "random-bandlimited":
        return random_bandlimited(sgrid, np.random.default_rng(seed), band)
    raise ParameterError(f"unknown preset {name!r}")


def random_bandlimited(sgrid: SpaceGrid, rng: np.random.Generator,
                       band: tuple[float, float] = (1.0, 4.0)) -> np.ndarray:
    """Real field with Gaussian random Fourier coefficients on band[0] <= |xi| <= band[1], unit L_2 norm."""
    r = np.sqrt(frequency_lattice(sgrid))
    mask = (r >= band[0]) & (r <= band[1])
    if not mask.any():
        raise ParameterError(f"band {band} contains no lattice frequencies")
    coef = (rng.standard_normal(sgrid.shape) + 1j * rng.standard_normal(sgrid.shape)) * mask
    f = np.fft.ifftn(coef).real
    nrm = float(lp_norm(f, sgrid, 2.0))
    return f / nrm
