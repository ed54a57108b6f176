"""Periodic space grids, graded time grids and sampled space-time fields.

The spatial domain is the torus [-L, L)^d sampled at n points per axis.
Transforms use numpy's FFT ordering and the unitary ("ortho") scaling, so
``dft_inverse(dft_forward(f)) == f`` and Parseval holds with unit constant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DimensionError, DomainError, ParameterError


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpaceGrid:
    d: int = 1
    L: float = 16.0
    n: int = 256

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ParameterError(f"d must be 1, 2 or 3, got {self.d}")
        if not (isinstance(self.n, (int, np.integer)) and _is_pow2(int(self.n)) and self.n >= 8):
            raise ParameterError(f"n must be a power of two >= 8, got {self.n}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ParameterError(f"L must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def cell_volume(self) -> float:
        return self.h**self.d

    @cached_property
    def x(self) -> np.ndarray:
        """1-d node coordinates x_i = -L + i h."""
        return -self.L + self.h * np.arange(self.n)

    @cached_property
    def xi(self) -> np.ndarray:
        """1-d wavenumbers (pi/L) k in FFT ordering."""
        return (math.pi / self.L) * np.fft.fftfreq(self.n, d=1.0 / self.n)

    @property
    def xi_max(self) -> float:
        """Largest |xi| present on the lattice (attained at the corner)."""
        return math.sqrt(self.d) * math.pi * (self.n // 2) / self.L

    def coords(self) -> list[np.ndarray]:
        return list(np.meshgrid(*([self.x] * self.d), indexing="ij"))

    def radius(self) -> np.ndarray:
        """Torus distance from each node to the origin."""
        r2 = np.zeros(self.shape)
        for c in self.coords():
            r2 += c**2
        return np.sqrt(r2)

    def xi_axes(self) -> list[np.ndarray]:
        """Per-axis wavenumber arrays broadcastable to ``shape``."""
        out = []
        for a in range(self.d):
            s = [1] * self.d
            s[a] = self.n
            out.append(self.xi.reshape(s))
        return out

    def refine(self, factor: int = 2) -> SpaceGrid:
        return SpaceGrid(self.d, self.L, self.n * factor)


@dataclass(frozen=True)
class TimeGrid:
    """Nodes t_i = T (i/M)^r, i = 0..M."""

    T: float = 1.0
    M: int = 512
    r: float = 1.0

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ParameterError(f"T must be positive, got {self.T}")
        if int(self.M) != self.M or self.M < 2:
            raise ParameterError(f"M must be an integer >= 2, got {self.M}")
        if self.r < 1:
            raise ParameterError(f"grading exponent r must be >= 1, got {self.r}")

    @classmethod
    def graded(cls, T: float, M: int, alpha: float) -> TimeGrid:
        """Grid with the default grading r = max(1, 2/alpha)."""
        return cls(T, M, max(1.0, 2.0 / alpha))

    @cached_property
    def t(self) -> np.ndarray:
        t = self.T * (np.arange(self.M + 1) / self.M) ** self.r
        t[-1] = self.T
        return t

    @cached_property
    def steps(self) -> np.ndarray:
        return np.diff(self.t)

    def refine(self, factor: int = 2) -> TimeGrid:
        return TimeGrid(self.T, self.M * factor, self.r)


@dataclass
class SampledField:
    """Values of u(t_i, x) on a time grid times a space grid.

    ``values`` has shape (M+1, n, ..., n).  Real fields are stored as float64.
    ``time_derivative`` optionally holds exact samples of du/dt.
    """

    sgrid: SpaceGrid
    tgrid: TimeGrid
    values: np.ndarray
    real: bool = field(default=True)
    time_derivative: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        expected = (self.tgrid.M + 1,) + self.sgrid.shape
        v = np.asarray(self.values)
        if v.shape != expected:
            raise DimensionError(f"field shape {v.shape} does not match grids {expected}")
        if self.real:
            if np.iscomplexobj(v):
                scale = max(float(np.max(np.abs(v))), 1e-300)
                if float(np.max(np.abs(v.imag))) > 1e-10 * scale:
                    raise DomainError("field flagged real has non-negligible imaginary part")
                v = v.real
            v = np.ascontiguousarray(v, dtype=np.float64)
        else:
            v = np.ascontiguousarray(v, dtype=np.complex128)
        self.values = v

    def at(self, i: int) -> np.ndarray:
        return self.values[i]

    def flat(self) -> np.ndarray:
        """Values reshaped to (M+1, n^d)."""
        return self.values.reshape(self.tgrid.M + 1, -1)


def _check_slice(f: np.ndarray, grid: SpaceGrid) -> None:
    f = np.asarray(f)
    if f.ndim < grid.d or f.shape[f.ndim - grid.d:] != grid.shape:
        raise DimensionError(f"array of shape {f.shape} does not end with grid shape {grid.shape}")


def _spatial_axes(f: np.ndarray, grid: SpaceGrid) -> tuple[int, ...]:
    return tuple(range(f.ndim - grid.d, f.ndim))


def dft_forward(f: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    """Unitary DFT over the trailing d axes."""
    f = np.asarray(f)
    _check_slice(f, grid)
    return np.fft.fftn(f, axes=_spatial_axes(f, grid), norm="ortho")


def dft_inverse(fh: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    fh = np.asarray(fh)
    _check_slice(fh, grid)
    return np.fft.ifftn(fh, axes=_spatial_axes(fh, grid), norm="ortho")


def frequency_lattice(grid: SpaceGrid) -> np.ndarray:
    """|xi|^2 on the lattice in FFT ordering."""
    out = np.zeros(grid.shape)
    for k in grid.xi_axes():
        out = out + k**2
    return out


def apply_multiplier(f: np.ndarray, multiplier: np.ndarray, grid: SpaceGrid,
                     real: bool | None = None) -> np.ndarray:
    """Fourier multiplier over the trailing d axes (torus convolution)."""
    f = np.asarray(f)
    _check_slice(f, grid)
    if real is None:
        real = not np.iscomplexobj(f)
    ax = _spatial_axes(f, grid)
    out = np.fft.ifftn(np.fft.fftn(f, axes=ax) * multiplier, axes=ax)
    return out.real if real else out


def _nyquist_mask(grid: SpaceGrid) -> list[np.ndarray]:
    masks = []
    for a in range(grid.d):
        m = np.ones(grid.n)
        m[grid.n // 2] = 0.0
        s = [1] * grid.d
        s[a] = grid.n
        masks.append(m.reshape(s))
    return masks


def gradient(f: np.ndarray, grid: SpaceGrid) -> list[np.ndarray]:
    """Spectral partial derivatives (Nyquist mode dropped)."""
    masks = _nyquist_mask(grid)
    return [apply_multiplier(f, 1j * k * m, grid) for k, m in zip(grid.xi_axes(), masks)]


def hessian(f: np.ndarray, grid: SpaceGrid) -> list[np.ndarray]:
    """Second derivatives D_a D_b for a <= b, in row-major order."""
    ks = grid.xi_axes()
    masks = _nyquist_mask(grid)
    out = []
    for a in range(grid.d):
        for b in range(a, grid.d):
            mult = -ks[a] * ks[b]
            if a != b:
                mult = mult * masks[a] * masks[b]
            out.append(apply_multiplier(f, mult, grid))
    return out


def gradient_magnitude(f: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    return np.sqrt(sum(np.abs(g) ** 2 for g in gradient(f, grid)))


def hessian_magnitude(f: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    """Frobenius norm of the Hessian."""
    parts = hessian(f, grid)
    total = np.zeros(np.shape(f))
    i = 0
    for a in range(grid.d):
        for b in range(a, grid.d):
            total = total + (1.0 if a == b else 2.0) * np.abs(parts[i]) ** 2
            i += 1
    return np.sqrt(total)


_INTERP_BLOCK = 256


def _interp_matrix(points_1d: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    y = points_1d[:, None] + grid.L
    E = np.exp(1j * y * grid.xi[None, :])
    E[:, grid.n // 2] = np.cos(y[:, 0] * (math.pi / grid.L) * (grid.n // 2))
    return E / grid.n


def interpolate_space(f: np.ndarray, points: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    """Trigonometric interpolation of one slice at arbitrary points.

    ``points`` has shape (P,) for d = 1 or (P, d).
    """
    f = np.asarray(f)
    if f.shape != grid.shape:
        raise DimensionError(f"slice shape {f.shape} does not match grid {grid.shape}")
    pts = np.asarray(points, dtype=float)
    if grid.d == 1 and pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] != grid.d:
        raise DimensionError(f"points must have shape (P, {grid.d})")
    if np.any(np.abs(pts) > grid.L * (1 + 1e-12)):
        raise DomainError("interpolation point outside [-L, L]^d")
    F = np.fft.fftn(f)
    out = np.empty(pts.shape[0], dtype=complex)
    # blocks of points keep the dense P x n matrices small
    for s in range(0, pts.shape[0], _INTERP_BLOCK):
        blk = pts[s:s + _INTERP_BLOCK]
        mats = [_interp_matrix(blk[:, a], grid) for a in range(grid.d)]
        if grid.d == 1:
            out[s:s + _INTERP_BLOCK] = mats[0] @ F
        elif grid.d == 2:
            out[s:s + _INTERP_BLOCK] = np.einsum("pi,pj,ij->p", mats[0], mats[1], F)
        else:
            out[s:s + _INTERP_BLOCK] = np.einsum("pi,pj,pk,ijk->p", mats[0], mats[1], mats[2], F)
    return out.real if not np.iscomplexobj(f) else out


def sample(func, sgrid: SpaceGrid) -> np.ndarray:
    """Evaluate ``func(*coords)`` on the grid."""
    return np.asarray(func(*sgrid.coords()), dtype=float) * np.ones(sgrid.shape)


def save_field(path: str | Path, fld: SampledField) -> None:
    """Write a field as CSV rows (t index, multi-index, re, im) after a JSON header line."""
    header = {
        "d": fld.sgrid.d, "L": fld.sgrid.L, "n": fld.sgrid.n,
        "T": fld.tgrid.T, "M": fld.tgrid.M, "r": fld.tgrid.r,
        "real": fld.real,
    }
    idx = np.indices(fld.values.shape).reshape(fld.values.ndim, -1).T
    vals = fld.values.reshape(-1)
    re = np.real(vals)
    im = np.imag(vals) if np.iscomplexobj(vals) else np.zeros_like(re)
    cols = ["t"] + [f"i{a}" for a in range(fld.sgrid.d)] + ["re", "im"]
    with open(path, "w") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        fh.write(",".join(cols) + "\n")
        for row, a, b in zip(idx, re, im):
            fh.write(",".join(str(int(v)) for v in row) + f",{a:.17g},{b:.17g}\n")


def load_field(path: str | Path) -> SampledField:
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise DomainError("missing JSON header line")
        header = json.loads(first[1:])
        data = np.loadtxt(fh, delimiter=",", skiprows=1, ndmin=2)
    sg = SpaceGrid(header["d"], header["L"], header["n"])
    tg = TimeGrid(header["T"], header["M"], header["r"])
    shape = (tg.M + 1,) + sg.shape
    d = sg.d
    vals = np.zeros(shape, dtype=complex)
    idx = tuple(data[:, a].astype(int) for a in range(d + 1))
    vals[idx] = data[:, d + 1] + 1j * data[:, d + 2]
    return SampledField(sg, tg, vals, real=bool(header["real"]))
