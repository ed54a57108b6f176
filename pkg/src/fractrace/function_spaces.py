"""Weighted mixed norms, Muckenhoupt constants and Besov/Bessel-potential norms on the torus.

Spatial weights are powers of the torus distance to the origin,
w(x) = rho(x)^nu.  They are integrated cell by cell: every grid cell uses the
nodal value times h^d except the cell around the origin, whose integral is
computed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import zeta

from .errors import DimensionError, ParameterError
from .grid import SpaceGrid, TimeGrid, apply_multiplier, frequency_lattice
from .quadrature import gauss_legendre, power_panel_weights


@dataclass(frozen=True)
class WeightSpec:
    """Time weight t^mu and spatial weight rho(x)^nu."""

    mu: float = 0.0
    nu: float = 0.0

    def validate(self, p: float, q: float, d: int) -> None:
        if not (p > 1 and q > 1):
            raise ParameterError(f"p and q must exceed 1, got p={p}, q={q}")
        if not (-1.0 < self.mu < q - 1.0):
            raise ParameterError(f"mu={self.mu} violates mu in (-1, q-1) with q={q}")
        if not (-d < self.nu < d * (p - 1)):
            raise ParameterError(
                f"nu={self.nu} outside the A_p range (-d, d(p-1)) = ({-d}, {d * (p - 1)})")


def _cube_power_integral(d: int, a: float, e: float) -> float:
    """int over [-a, a]^d of |x|^e dx, e > -d."""
    if e <= -d:
        raise ParameterError(f"|x|^{e} is not integrable near the origin in dimension {d}")
    if d == 1:
        c = 1.0
    else:
        x, w = gauss_legendre(48)
        z = 2.0 * x - 1.0
        wz = 2.0 * w
        grids = np.meshgrid(*([z] * (d - 1)), indexing="ij")
        weights = np.ones_like(grids[0])
        for g, ww in zip(grids, np.meshgrid(*([wz] * (d - 1)), indexing="ij")):
            weights = weights * ww
        r2 = 1.0 + sum(g**2 for g in grids)
        c = float(np.sum(weights * r2 ** (e / 2.0)))
    return 2 * d * a ** (e + d) / (e + d) * c


@lru_cache(maxsize=64)
def _cell_integrals(grid: SpaceGrid, e: float) -> np.ndarray:
    """Cell integrals of rho^e divided by h^d (exactly 1 everywhere when e == 0)."""
    if e == 0:
        return np.ones(grid.shape)
    if grid.d == 1:
        # every cell exactly: antiderivative sign(x)|x|^(e+1)/(e+1)
        if e <= -1:
            raise ParameterError(f"|x|^{e} is not integrable near the origin in dimension 1")
        lo = grid.x - grid.h / 2.0
        hi = grid.x + grid.h / 2.0

        def prim(x):
            return np.sign(x) * np.abs(x) ** (e + 1.0) / (e + 1.0)

        out = (prim(hi) - prim(lo)) / grid.h
        out.setflags(write=False)
        return out
    rho = grid.radius()
    out = np.empty(grid.shape)
    nz = rho > 0
    out[nz] = rho[nz] ** e
    origin = (grid.n // 2,) * grid.d
    out[origin] = _cube_power_integral(grid.d, grid.h / 2.0, e) / grid.cell_volume
    out.setflags(write=False)
    return out


def spatial_weights(grid: SpaceGrid, nu: float = 0.0) -> np.ndarray:
    """Quadrature weights for int f(x) rho(x)^nu dx."""
    return _cell_integrals(grid, float(nu)) * grid.cell_volume


def lp_norm(f, grid: SpaceGrid, p: float = 2.0, nu: float = 0.0) -> np.ndarray:
    """Weighted L_p norm over the trailing d axes."""
    f = np.asarray(f)
    if f.shape[f.ndim - grid.d:] != grid.shape:
        raise DimensionError(f"array of shape {f.shape} does not end with {grid.shape}")
    w = spatial_weights(grid, nu)
    axes = tuple(range(f.ndim - grid.d, f.ndim))
    if math.isinf(p):
        return np.max(np.abs(f), axis=axes)
    return np.sum(np.abs(f) ** p * w, axis=axes) ** (1.0 / p)


def mixed_norm(values, tgrid: TimeGrid, sgrid: SpaceGrid, p: float = 2.0, q: float = 2.0,
               weight: WeightSpec = WeightSpec(), start: int = 0) -> float:
    """L_{p,q,w} norm: (int_0^T ||u(t)||_{L_p(w2)}^q t^mu dt)^(1/q).

    The time integral uses t^mu exactly on each panel against the
    piecewise-linear interpolant of ||u(t)||^q; nodes before ``start`` are
    dropped from the integration range.
    """
    values = np.asarray(values)
    if values.shape != (tgrid.M + 1,) + sgrid.shape:
        raise DimensionError(f"values of shape {values.shape} do not match the grids")
    g = lp_norm(values, sgrid, p, weight.nu) ** q
    w = np.zeros(tgrid.M + 1)
    w[start:] = power_panel_weights(tgrid.t[start:], weight.mu)
    g = np.where(w > 0, g, 0.0)
    return float(np.dot(w, g) ** (1.0 / q))


def _torus_distance_axis(n: int, h: float, center: int) -> np.ndarray:
    k = (np.arange(n) - center) % n
    k = np.minimum(k, n - k)
    return k * h


def ap_constant_estimate(grid: SpaceGrid, nu: float, p: float = 2.0,
                         centers_per_axis: int = 16) -> float:
    """sup over sampled balls of avg(w) * avg(w^(-1/(p-1)))^(p-1).

    Balls are centred on a coarse sublattice (which contains the origin) with
    dyadic radii from h up to L/2.  Returns exactly 1.0 for the unit weight.
    """
    if not p > 1:
        raise ParameterError("p must exceed 1")
    WeightSpec(0.0, nu).validate(p, 2.0, grid.d)
    cw = _cell_integrals(grid, float(nu))
    cv = _cell_integrals(grid, float(-nu / (p - 1.0)))
    stride = max(1, grid.n // centers_per_axis)
    centers_1d = list(range(0, grid.n, stride))
    radii = []
    r = grid.h
    while r <= grid.L / 2.0 + 1e-12:
        radii.append(r)
        r *= 2.0
    best = 0.0
    for center in np.ndindex(*([len(centers_1d)] * grid.d)):
        c = [centers_1d[i] for i in center]
        dist2 = np.zeros(grid.shape)
        for a in range(grid.d):
            da = _torus_distance_axis(grid.n, grid.h, c[a])
            s = [1] * grid.d
            s[a] = grid.n
            dist2 = dist2 + da.reshape(s) ** 2
        for rad in radii:
            ball = dist2 <= rad * rad * (1 + 1e-12)
            aw = float(np.mean(cw[ball]))
            av = float(np.mean(cv[ball]))
            best = max(best, aw * av ** (p - 1.0))
    return best


# ---------------------------------------------------------------- Littlewood-Paley

def _smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[x >= 1] = 1.0
    mid = (x > 0) & (x < 1)
    a = np.exp(-1.0 / x[mid])
    b = np.exp(-1.0 / (1.0 - x[mid]))
    out[mid] = a / (a + b)
    return out


def lp_profile(r: np.ndarray) -> np.ndarray:
    """Radial profile equal to 1 on [0, 1], 0 beyond 2, smooth and decreasing."""
    return _smooth_step(2.0 - np.asarray(r, dtype=float))


@dataclass(frozen=True)
class LPFamily:
    """Fourier multipliers of the low-pass Psi and the dyadic shells psi_j, j = 1..J."""

    grid: SpaceGrid
    low: np.ndarray
    shells: tuple[np.ndarray, ...]

    @property
    def J(self) -> int:
        return len(self.shells)

    def partition_error(self) -> float:
        return float(np.max(np.abs(self.low + sum(self.shells) - 1.0)))


@lru_cache(maxsize=32)
def build_lp_family(grid: SpaceGrid) -> LPFamily:
    """psi_j(xi) = phi(2^-j xi) - phi(2^(1-j) xi), Psi = phi; J = ceil(log2 max|xi|)."""
    r = np.sqrt(frequency_lattice(grid))
    rmax = float(r.max())
    J = max(1, math.ceil(math.log2(rmax)))
    low = lp_profile(r)
    shells = tuple(lp_profile(r / 2.0**j) - lp_profile(r / 2.0 ** (j - 1)) for j in range(1, J + 1))
    return LPFamily(grid, low, shells)


def bessel_multiplier(grid: SpaceGrid, s: float) -> np.ndarray:
    return (1.0 + frequency_lattice(grid)) ** (s / 2.0)


def bessel_potential(f, s: float, grid: SpaceGrid) -> np.ndarray:
    """(1 - Laplacian)^(s/2) f."""
    return apply_multiplier(f, bessel_multiplier(grid, s), grid)


def sobolev_norm(f, s: float, p: float, grid: SpaceGrid, nu: float = 0.0) -> float:
    """||(1 - Laplacian)^(s/2) f||_{L_p(w2)}."""
    return float(lp_norm(bessel_potential(f, s, grid), grid, p, nu))


def besov_parts(f, s: float, p: float, fam: LPFamily, nu: float = 0.0,
                lift: bool = False) -> np.ndarray:
    """[||Psi*f||, 2^(js) ||psi_j*f|| for j = 1..J].

    With ``lift=True`` the dyadic factors 2^(js) are replaced by the multiplier
    (1 - Laplacian)^(s/2) inside every block.
    """
    grid = fam.grid
    f = np.asarray(f)
    if f.shape != grid.shape:
        raise DimensionError(f"field of shape {f.shape} does not match grid {grid.shape}")
    F = np.fft.fftn(f)
    real = not np.iscomplexobj(f)
    lift_mult = bessel_multiplier(grid, s) if lift else 1.0
    parts = []
    for j, m in enumerate((fam.low,) + fam.shells):
        g = np.fft.ifftn(F * m * lift_mult)
        g = g.real if real else g
        scale = 1.0 if lift else 2.0 ** (j * s)
        parts.append(scale * float(lp_norm(g, grid, p, nu)))
    return np.array(parts)


def besov_norm(f, s: float, p: float, q: float, fam: LPFamily, nu: float = 0.0,
               lift: bool = False) -> float:
    """||Psi*f|| + (sum_j 2^(jsq) ||psi_j*f||^q)^(1/q) in L_p(rho^nu)."""
    parts = besov_parts(f, s, p, fam, nu, lift)
    tail = parts[1:]
    if math.isinf(q):
        high = float(tail.max()) if tail.size else 0.0
    else:
        high = float(np.sum(tail**q) ** (1.0 / q))
    return float(parts[0] + high)


# ---------------------------------------------------------------- differences

def _second_difference_norms(F: np.ndarray, grid: SpaceGrid, hs: np.ndarray, p: float,
                             chunk: int = 512) -> np.ndarray:
    xi = grid.xi
    nyq = grid.n // 2
    out = np.empty(hs.size)
    w = grid.h
    for s in range(0, hs.size, chunk):
        h = hs[s:s + chunk, None]
        e1 = np.exp(1j * xi[None, :] * h)
        m = (e1 - 1.0) ** 2
        cn = np.cos(xi[nyq] * h[:, 0])
        m[:, nyq] = np.cos(2 * xi[nyq] * h[:, 0]) - 2 * cn + 1.0
        g = np.fft.ifft(F[None, :] * m, axis=1).real
        out[s:s + chunk] = (np.sum(np.abs(g) ** p, axis=1) * w) ** (1.0 / p)
    return out


def besov_norm_differences(f, s: float, p: float, q: float, grid: SpaceGrid,
                           nodes_per_cell: int = 8) -> float:
    """||f||_p + (int_R |h|^(-sq) ||f(.+2h) - 2f(.+h) + f||_p^q dh/|h|)^(1/q), d = 1.

    Shifts are exact for the trigonometric interpolant.  The part |h| > L is
    folded back onto one period with the Hurwitz-zeta weight
    sum_{m>=1} (h + 2Lm)^(-sq-1).  Below rho_min the leading Taylor term
    rho^2 ||f''||_p closes the integral analytically.
    """
    if grid.d != 1:
        raise DimensionError("second-difference Besov norm is implemented for d = 1")
    if not (0.0 < s < 2.0):
        raise ParameterError(f"smoothness must lie in (0, 2), got {s}")
    if not (p >= 1 and q >= 1) or math.isinf(q):
        raise ParameterError("need finite p, q >= 1")
    f = np.asarray(f, dtype=float)
    F = np.fft.fft(f)
    L, hg = grid.L, grid.h
    a = s * q
    x, w = gauss_legendre(nodes_per_cell)

    # log-graded panels on (rho_min, hg], then uniform half-cells on (hg, L]
    k_low = 40
    edges = [hg * 2.0 ** (-k) for k in range(k_low, 0, -1)] + [hg]
    n_uniform = int(round(2 * (L - hg) / hg))
    edges += list(np.linspace(hg, L, n_uniform + 1)[1:])
    edges = np.array(edges)
    lo, hi = edges[:-1], edges[1:]
    rho = (lo[:, None] + (hi - lo)[:, None] * x[None, :]).ravel()
    wr = ((hi - lo)[:, None] * w[None, :]).ravel()
    G = _second_difference_norms(F, grid, rho, p) ** q
    inner = float(np.sum(wr * rho ** (-a - 1.0) * G))

    # analytic piece on (0, rho_min)
    rho_min = edges[0]
    f2 = float(lp_norm(apply_multiplier(f, -grid.xi**2, grid), grid, p))
    inner += f2**q * rho_min ** ((2.0 - s) * q) / ((2.0 - s) * q)

    # folded tail: h in (0, L] contributes with W(h) + W(-h)
    hn = rho
    period = 2.0 * L
    Wp = period ** (-a - 1.0) * zeta(a + 1.0, 1.0 + hn / period)
    Wm = period ** (-a - 1.0) * zeta(a + 1.0, 1.0 - hn / period)
    tail = float(np.sum(wr * G * (Wp + Wm)))

    integral = 2.0 * (inner + tail)
    return float(lp_norm(f, grid, p)) + integral ** (1.0 / q)


# ---------------------------------------------------------------- K-functional

def k_functional(f, eps: float, p: float, grid: SpaceGrid, nu: float = 0.0) -> float:
    """min over spectral-cutoff splits f = (f - U1) + U1 of ||f - U1||_p + eps ||U1||_{H^2_p}.

    Candidates are U1 = 0, U1 = f and the smooth low-pass filters phi(|xi|/Lambda)
    for dyadic Lambda covering the lattice.
    """
    f = np.asarray(f, dtype=float)
    cands = _k_candidates(f, grid, nu, p)
    return float(np.min(cands[:, 0] + eps * cands[:, 1]))


def _k_candidates(f, grid: SpaceGrid, nu: float, p: float) -> np.ndarray:
    r = np.sqrt(frequency_lattice(grid))
    F = np.fft.fftn(f)
    lift = 1.0 + r**2
    rows = [(float(lp_norm(f, grid, p, nu)), 0.0)]
    top = max(1, math.ceil(math.log2(max(r.max(), 1.0)))) + 1
    for k in range(-6, top + 1):
        m = lp_profile(r / 2.0**k)
        u1 = np.fft.ifftn(F * m).real
        rest = np.fft.ifftn(F * (1.0 - m)).real
        h2 = np.fft.ifftn(F * m * lift).real
        rows.append((float(lp_norm(rest, grid, p, nu)), float(lp_norm(h2, grid, p, nu))))
    rows.append((0.0, float(lp_norm(np.fft.ifftn(F * lift).real, grid, p, nu))))
    return np.array(rows)


def interpolation_norm(f, theta: float, q: float, p: float, grid: SpaceGrid,
                       nu: float = 0.0, per_octave: int = 8) -> float:
    """(int_0^inf (eps^-theta K(eps))^q deps/eps)^(1/q) with analytic end tails."""
    if not (0.0 < theta < 1.0):
        raise ParameterError("theta must lie in (0, 1)")
    f = np.asarray(f, dtype=float)
    cands = _k_candidates(f, grid, nu, p)
    lo_exp, hi_exp = -40, 20
    logs = np.linspace(lo_exp, hi_exp, (hi_exp - lo_exp) * per_octave + 1) * math.log(2.0)
    eps = np.exp(logs)
    K = np.min(cands[:, 0][None, :] + eps[:, None] * cands[:, 1][None, :], axis=1)
    vals = (eps ** (-theta) * K) ** q
    body = float(np.trapezoid(vals, logs))
    h2 = cands[-1, 1]
    l0 = cands[0, 0]
    e0, e1 = eps[0], eps[-1]
    body += (e0 ** (1 - theta) * h2) ** q / ((1 - theta) * q)
    body += (e1 ** (-theta) * l0) ** q / (theta * q)
    return body ** (1.0 / q)
