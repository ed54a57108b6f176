"""Fundamental solutions of the time-fractional heat/wave equation on the torus.

Fourier symbols: P_hat = E_beta(-|xi|^2 t^beta) and, for beta > 1,
P_tilde_hat = t E_{beta,2}(-|xi|^2 t^beta).  Real-space kernels are obtained
by inverse DFT with the continuum normalisation, so the discrete mass
h^d sum P equals P_hat(0) = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ResolutionWarning
from .grid import SpaceGrid, frequency_lattice, interpolate_space
from .mittag_leffler import ml_eval_array

UNRESOLVED_LEVEL = 1e-12


def _check_beta(beta: float) -> None:
    if not (0.0 < beta < 2.0):
        raise ParameterError(f"beta must lie in (0, 2), got {beta}")


def kernel_hat(beta: float, t, xi2) -> np.ndarray:
    """E_beta(-|xi|^2 t^beta), broadcasting t against xi2."""
    _check_beta(beta)
    t = np.asarray(t, dtype=float)
    v = np.multiply.outer(t**beta, np.asarray(xi2, dtype=float)) if t.ndim else t**beta * np.asarray(xi2)
    return ml_eval_array(beta, 1.0, v)


def kernel_tilde_hat(beta: float, t, xi2) -> np.ndarray:
    """t E_{beta,2}(-|xi|^2 t^beta); beta = 1 is accepted as the boundary reference."""
    if not (1.0 <= beta < 2.0):
        raise ParameterError(f"the second kernel needs beta in (1, 2), got {beta}")
    t = np.asarray(t, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    if t.ndim:
        v = np.multiply.outer(t**beta, xi2)
        return t.reshape(t.shape + (1,) * xi2.ndim) * ml_eval_array(beta, 2.0, v)
    return t * ml_eval_array(beta, 2.0, t**beta * xi2)


def symbol_to_field(symbol: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    """Real-space function on the grid whose continuum Fourier transform is ``symbol``.

    P(x_i) = (2L)^-d sum_k symbol_k exp(i xi_k . x_i) with x_i = -L + i h.
    """
    phase = np.ones(grid.shape)
    for a in range(grid.d):
        s = [1] * grid.d
        s[a] = grid.n
        phase = phase * ((-1.0) ** np.arange(grid.n)).reshape(s)
    vals = np.fft.ifftn(symbol * phase) / grid.cell_volume
    return vals.real


@dataclass(frozen=True)
class KernelSpec:
    beta: float
    t: float
    grid: SpaceGrid
    tilde: bool = False


def unresolved_level(beta: float, t: float, grid: SpaceGrid) -> float:
    """|P_hat| at the largest lattice frequency."""
    return float(abs(kernel_hat(beta, t, np.array([grid.xi_max**2]))[0]))


def kernel_field(spec: KernelSpec, warn: bool = True) -> np.ndarray:
    """P_beta(t, .) (or P_tilde) sampled on the grid."""
    if not spec.t > 0:
        raise ParameterError("t must be positive")
    xi2 = frequency_lattice(spec.grid)
    if spec.tilde:
        sym = kernel_tilde_hat(spec.beta, spec.t, xi2)
    else:
        sym = kernel_hat(spec.beta, spec.t, xi2)
    if warn:
        level = unresolved_level(spec.beta, spec.t, spec.grid)
        if level > UNRESOLVED_LEVEL:
            warnings.warn(
                f"symbol at the largest frequency is {level:.3e} > {UNRESOLVED_LEVEL:g}; "
                "the kernel is not resolved by this grid", ResolutionWarning, stacklevel=2)
    return symbol_to_field(sym, spec.grid)


def kernel_mass(spec: KernelSpec) -> float:
    return float(np.sum(kernel_field(spec, warn=False)) * spec.grid.cell_volume)


def check_scaling(beta: float, t: float, grid: SpaceGrid, bulk: float = 1e-6) -> float:
    """Max error of P(t, x) - t^(-beta d/2) P(1, t^(-beta/2) x) relative to the peak of P(t, .).

    Compared on the bulk region where P(1, t^(-beta/2) x) >= bulk * max P(1, .),
    with P(1, .) evaluated off-grid by trigonometric interpolation.
    """
    _check_beta(beta)
    p_t = kernel_field(KernelSpec(beta, t, grid), warn=False)
    p_1 = kernel_field(KernelSpec(beta, 1.0, grid), warn=False)
    s = t ** (-beta / 2.0)
    coords = np.stack([c.ravel() for c in grid.coords()], axis=1)
    scaled = coords * s
    inside = np.all(np.abs(scaled) <= grid.L, axis=1)
    pred = np.zeros(coords.shape[0])
    pred[inside] = interpolate_space(p_1, scaled[inside], grid) * t ** (-beta * grid.d / 2.0)
    peak1 = float(p_1.max())
    mask = inside & (pred >= bulk * peak1 * t ** (-beta * grid.d / 2.0))
    diff = np.abs(p_t.ravel()[mask] - pred[mask])
    return float(diff.max() / p_t.max())


@dataclass
class DecayReport:
    beta: float
    sigma: float
    log_amplitude: float
    r_squared: float
    envelope_constant: float
    fit_range: tuple[float, float]


def decay_exponent(beta: float) -> float:
    return 2.0 / (2.0 - beta)


def near_origin_envelope(r: np.ndarray, d: int) -> np.ndarray:
    """|x|^-d (|x|^2 + |x|^2 |log|x|| [d = 2] + |x| [d = 1]) for 0 < |x| < 1."""
    r = np.asarray(r, dtype=float)
    env = r**2
    if d == 2:
        env = env + r**2 * np.abs(np.log(r))
    if d == 1:
        env = env + r
    return env * r ** (-float(d))


def check_decay(beta: float, grid: SpaceGrid, fit_range: tuple[float, float] = (2.0, 8.0)) -> DecayReport:
    """Fit log P(1, x) = log N - sigma |x|^(2/(2-beta)) on the radial fit range.

    ``envelope_constant`` is the smallest N' with P <= N' times the two-regime
    envelope on the whole grid, the far regime using 0.9 sigma.
    """
    _check_beta(beta)
    p = kernel_field(KernelSpec(beta, 1.0, grid), warn=False)
    r = grid.radius().ravel()
    pv = p.ravel()
    a, b = fit_range
    sel = (r >= a) & (r <= b) & (pv > 0)
    if sel.sum() < 3:
        raise ParameterError("fit range contains too few positive samples")
    X = r[sel] ** decay_exponent(beta)
    Y = np.log(pv[sel])
    A = np.stack([np.ones_like(X), -X], axis=1)
    coef, *_ = np.linalg.lstsq(A, Y, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((Y - pred) ** 2))
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    sigma = float(coef[1])
    env = np.empty_like(r)
    far = r >= 1.0
    env[far] = np.exp(-0.9 * sigma * r[far] ** decay_exponent(beta))
    near = (~far) & (r > 0)
    env[near] = near_origin_envelope(r[near], grid.d)
    ok = (r > 0) & (r <= b)
    n_env = float(np.max(np.abs(pv[ok]) / env[ok]))
    return DecayReport(beta, sigma, float(coef[0]), 1.0 - ss_res / ss_tot, n_env, fit_range)


def second_moments(beta: float, times, grid: SpaceGrid) -> np.ndarray:
    """int |x|^2 P(t, x) dx on the grid for each t."""
    r2 = grid.radius() ** 2
    return np.array([float(np.sum(r2 * kernel_field(KernelSpec(beta, t, grid), warn=False)))
                     * grid.cell_volume for t in times])


def second_moment_slope(beta: float, times, grid: SpaceGrid) -> float:
    """Least-squares slope of log m2(t) against log t."""
    m = second_moments(beta, times, grid)
    return float(np.polyfit(np.log(np.asarray(times, dtype=float)), np.log(m), 1)[0])


def exact_second_moment(beta: float, t: float, d: int) -> float:
    """-Laplacian of the symbol at 0: 2 d t^beta / Gamma(1 + beta)."""
    return 2.0 * d * t**beta / math.gamma(1.0 + beta)
