"""Mittag-Leffler functions E_{beta,c}(-v) for v >= 0.

Two independent evaluation routes:

* the power series, summed in double precision when cancellation is mild and
  with mpmath at raised precision otherwise;
* contour-integral representations on (0, inf), evaluated by adaptive
  composite Gauss-Legendre quadrature on geometrically graded panels.

``ml_eval`` uses the series for v <= v_switch and the integral beyond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import gammaln, rgamma

from .errors import AccuracyError, DomainError, ParameterError
from .quadrature import gauss_legendre

MAX_TERMS = 10_000
# largest series term tolerated in double precision (about 4 digits lost)
FLOAT_TERM_LIMIT = 1e4
_GL_ORDER = 20
_CHUNK = 4096
ONE_PARAM_MAX = 0.95


def delta_range(beta: float) -> tuple[float, float]:
    """Admissible open-closed interval (lo, hi] for the contour angle."""
    return math.pi * beta / 2.0, min(math.pi, math.pi * beta)


def default_delta(beta: float) -> float:
    lo, hi = delta_range(beta)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class MittagLefflerParams:
    beta: float
    c: float = 1.0
    delta: float | None = None
    v_switch: float = 5.0

    def __post_init__(self):
        if not (0.0 < self.beta <= 2.0):
            raise ParameterError(f"beta must lie in (0, 2], got {self.beta}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ParameterError(f"c must be positive, got {self.c}")
        if self.delta is not None:
            check_delta(self.beta, self.delta)
        if not self.v_switch >= 0:
            raise ParameterError("v_switch must be non-negative")

    @property
    def angle(self) -> float:
        return default_delta(self.beta) if self.delta is None else self.delta


def check_delta(beta: float, delta: float) -> None:
    lo, hi = delta_range(beta)
    if not (lo < delta <= hi) or beta >= 2.0:
        raise ParameterError(
            f"delta={delta} outside the admissible range ({lo}, {hi}] for beta={beta}")


# ---------------------------------------------------------------- series

def _log_terms(beta: float, c: float, logv: float, k: np.ndarray) -> np.ndarray:
    return k * logv - gammaln(beta * k + c)


def max_log_term(beta: float, c: float, v: float) -> tuple[float, int]:
    """(max_k log|term_k|, argmax) for the series at v; scans up to MAX_TERMS."""
    if v <= 0:
        return float(-gammaln(c)), 0
    k = np.arange(MAX_TERMS + 1, dtype=float)
    lt = _log_terms(beta, c, math.log(v), k)
    j = int(np.argmax(lt))
    return float(lt[j]), j


def _terms_needed(beta: float, c: float, v: float, rel: float) -> int:
    """Smallest K past the peak with term_K < rel * exp(max log term) * 1e-3."""
    if v <= 0:
        return 1
    k = np.arange(MAX_TERMS + 1, dtype=float)
    lt = _log_terms(beta, c, math.log(v), k)
    peak = int(np.argmax(lt))
    # the sum itself is at least ~1/(1+v)/Gamma-ish; use an absolute floor tied to the peak
    thresh = min(lt[peak], 0.0) + math.log(rel) - 3.0 * math.log(10)
    below = np.nonzero(lt[peak:] < thresh)[0]
    if below.size == 0:
        raise AccuracyError(
            f"series for E_{{{beta},{c}}}(-{v}) needs more than {MAX_TERMS} terms")
    return peak + int(below[0]) + 1


def ml_series(beta: float, c: float, v: float, tol: float = 1e-16) -> float:
    """Series value of E_{beta,c}(-v), with extended precision when needed."""
    if v < 0:
        raise DomainError("v must be non-negative")
    if v == 0:
        return float(rgamma(c))
    peak_log, _ = max_log_term(beta, c, v)
    K = _terms_needed(beta, c, v, tol)
    if peak_log <= math.log(FLOAT_TERM_LIMIT):
        k = np.arange(K, dtype=float)
        terms = np.exp(_log_terms(beta, c, math.log(v), k)) * np.sign(rgamma(beta * k + c))
        terms[1::2] *= -1.0
        return float(math.fsum(terms))
    dps = int(25 + peak_log / math.log(10))
    with mpmath.workdps(dps):
        mv = -mpmath.mpf(v)
        mb, mc = mpmath.mpf(beta), mpmath.mpf(c)
        s = mpmath.mpf(0)
        p = mpmath.mpf(1)
        for k in range(K):
            s += p * mpmath.rgamma(mb * k + mc)
            p *= mv
        return float(s)


def ml_series_array(beta: float, c: float, v: np.ndarray, tol: float = 1e-16) -> np.ndarray:
    """Vectorised series; falls back to the scalar routine where cancellation is severe."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    flat_v, flat_o = v.ravel(), out.ravel()
    if flat_v.size == 0:
        return out
    vmax = float(flat_v.max())
    safe = flat_v <= safe_switch(beta, c)
    if np.any(safe):
        vs = flat_v[safe]
        K = _terms_needed(beta, c, min(vmax, float(vs.max())), tol) if vs.max() > 0 else 1
        k = np.arange(K, dtype=float)
        coef = rgamma(beta * k + c)
        # Horner in -v
        acc = np.zeros_like(vs)
        for j in range(K - 1, -1, -1):
            acc = acc * (-vs) + coef[j]
        flat_o[safe] = acc
    for i in np.nonzero(~safe)[0]:
        flat_o[i] = ml_series(beta, c, float(flat_v[i]), tol)
    return out


@lru_cache(maxsize=256)
def safe_switch(beta: float, c: float = 1.0, cap: float = 5.0) -> float:
    """Largest v <= cap whose series keeps all terms below FLOAT_TERM_LIMIT."""
    lim = math.log(FLOAT_TERM_LIMIT)
    if max_log_term(beta, c, cap)[0] <= lim:
        return cap
    lo, hi = 0.0, cap
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if max_log_term(beta, c, mid)[0] <= lim:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------- integrals

def _panel_edges(lo_exp: int, hi_edge: float, ratio: float = 8.0) -> list[tuple[float, float]]:
    """Geometric panels [ratio^-k-1, ratio^-k] down to ratio^lo_exp, then [ratio^-lo, ...] up."""
    edges = [0.0] + [ratio ** (-k) for k in range(lo_exp, 0, -1)] + [1.0]
    e = 1.0
    while e < hi_edge:
        e *= 2.0
        edges.append(e)
    return list(zip(edges[:-1], edges[1:]))


def _gl_panel(func, v: np.ndarray, a: float, b: float, m: int):
    """Composite GL sum of func and of |func| over [a, b] split into m pieces."""
    x, w = gauss_legendre(_GL_ORDER)
    h = (b - a) / m
    nodes = (a + h * (np.arange(m)[:, None] + x[None, :])).ravel()
    weights = np.tile(w * h, m)
    vals = func(nodes[:, None], v[None, :]).T
    return vals @ weights, np.abs(vals) @ weights


def _adaptive(func, v: np.ndarray, panels, tol_abs=1e-17, tol_rel=1e-13, max_m=512) -> np.ndarray:
    """Panel-wise doubling until successive sums agree.

    The relative tolerance is measured against the integral of |func|, so a
    result that is small through cancellation (near a zero of an oscillating
    E_{beta,c}) does not demand impossible accuracy.
    """
    total = np.zeros_like(v)
    scale = np.zeros_like(v)
    for a, b in panels:
        m = 1
        est, _ = _gl_panel(func, v, a, b, m)
        while True:
            m2 = 2 * m
            est2, mag = _gl_panel(func, v, a, b, m2)
            err = np.abs(est2 - est)
            if np.all(err <= tol_abs + tol_rel * (scale + mag)):
                break
            if m2 >= max_m:
                raise AccuracyError(f"quadrature did not converge on panel [{a}, {b}]")
            m, est = m2, est2
        total += est2
        scale += mag
    return total


def _chunked(fn, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    flat = v.ravel()
    out = np.empty_like(flat)
    for s in range(0, flat.size, _CHUNK):
        out[s:s + _CHUNK] = fn(flat[s:s + _CHUNK])
    return out.reshape(v.shape)


def ml_integral_one_param(alpha: float, v):
    """E_alpha(-v) for alpha in (0, 1) and v > 0 from the real-line integral.

    After the substitution sigma = v r^alpha the integrand is
    v exp(-sigma^(1/alpha)) / (sigma^2 + 2 sigma v cos(alpha pi) + v^2).
    """
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"one-parameter integral needs alpha in (0, 1), got {alpha}")
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr <= 0):
        raise DomainError("integral representation needs v > 0")
    ca = math.cos(alpha * math.pi)
    pref = math.sin(alpha * math.pi) / (alpha * math.pi)
    inv = 1.0 / alpha

    def f(s, vv):
        return vv * np.exp(-(s**inv)) / (s * s + 2.0 * s * vv * ca + vv * vv)

    def run(vc):
        lo = int(min(60, max(6, math.ceil(-math.log(vc.min()) / math.log(8.0)) + 6)))
        return pref * _adaptive(f, vc, _panel_edges(lo, 46.0**alpha))

    out = _chunked(run, v_arr)
    return float(out) if np.ndim(v) == 0 else out


def _reduce_c(beta: float, c: float) -> list[float]:
    """Chain c, c-beta, ... until the last entry is below 1 + beta."""
    chain = [c]
    while chain[-1] >= 1.0 + beta:
        chain.append(chain[-1] - beta)
    return chain


def ml_integral_two_param(beta: float, c: float, v, delta: float | None = None):
    """E_{beta,c}(-v) for v > 0 from the two-parameter contour integral.

    For c >= 1 + beta the identity E_{b,c}(-v) = (1/Gamma(c-b) - E_{b,c-b}(-v)) / v
    is applied until the representation's hypothesis c < 1 + beta holds.
    """
    if not (0.0 < beta < 2.0):
        raise ParameterError(f"two-parameter integral needs beta in (0, 2), got {beta}")
    if c <= 0:
        raise ParameterError(f"c must be positive, got {c}")
    if delta is None:
        delta = default_delta(beta)
    check_delta(beta, delta)
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr <= 0):
        raise DomainError("integral representation needs v > 0")
    chain = _reduce_c(beta, c)
    val = _chunked(lambda vc: _two_param_core(beta, chain[-1], vc, delta), v_arr)
    for cc in reversed(chain[:-1]):
        val = (rgamma(cc - beta) - val) / v_arr
    return float(val) if np.ndim(v) == 0 else val


def _two_param_core(beta: float, c: float, v: np.ndarray, delta: float) -> np.ndarray:
    a = (1.0 - c) / beta
    cd = math.cos(delta / beta)
    sd = math.sin(delta / beta)
    cdel = math.cos(delta)
    phase0 = delta * (1.0 + a)
    inv = 1.0 / beta

    def g(r, vv):
        rb = r**inv
        psi = rb * sd + phase0
        num = r * np.sin(psi - delta) + vv * np.sin(psi)
        return np.exp(rb * cd) * num / (r * r + 2.0 * r * vv * cdel + vv * vv)

    # int_0^1 r^a g dr with r = s^kappa so that r^a dr = kappa ds
    kappa = 1.0 / (1.0 + a)

    def inner(s, vv):
        return kappa * g(s**kappa, vv)

    def outer(r, vv):
        return r**a * g(r, vv)

    r_max = (60.0 / -cd) ** beta
    lo = int(min(60, max(6, math.ceil(-math.log(v.min()) / math.log(8.0) / kappa) + 6)))
    panels = _panel_edges(lo, r_max)
    inner_p = [p for p in panels if p[1] <= 1.0]
    outer_p = [p for p in panels if p[0] >= 1.0]
    total = _adaptive(inner, v, inner_p) + _adaptive(outer, v, outer_p)
    return total / (math.pi * beta)


# ---------------------------------------------------------------- dispatch

def _integral_any(beta: float, c: float, v: np.ndarray, delta: float | None) -> np.ndarray:
    if beta == 2.0:
        # the contour-angle range (pi, pi] is empty; stay on the (extended precision) series
        return np.array([ml_series(beta, c, float(x)) for x in np.ravel(v)]).reshape(np.shape(v))
    # the one-parameter integrand peaks at sigma = v with relative width about
    # pi (1 - beta); close to beta = 1 the contour form is the robust choice
    if c == 1.0 and beta <= ONE_PARAM_MAX and delta is None:
        return ml_integral_one_param(beta, v)
    return ml_integral_two_param(beta, c, v, delta)


def ml_eval(params: MittagLefflerParams, v: float) -> tuple[float, str]:
    """Scalar E_{beta,c}(-v) and the branch used ("series" or "integral")."""
    if v < 0 or not math.isfinite(v):
        raise DomainError(f"v must be finite and non-negative, got {v}")
    if v <= params.v_switch or params.beta == 2.0:
        return ml_series(params.beta, params.c, v), "series"
    return float(_integral_any(params.beta, params.c, np.array([v]), params.delta)[0]), "integral"


def ml_eval_array(beta: float, c: float, v, delta: float | None = None,
                  v_switch: float | None = None) -> np.ndarray:
    """Vectorised E_{beta,c}(-v).

    ``v_switch=None`` picks the largest switch point (at most 5) for which the
    double-precision series is free of cancellation.
    """
    MittagLefflerParams(beta, c, delta)
    v = np.asarray(v, dtype=float)
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise DomainError("v must be finite and non-negative")
    sw = safe_switch(beta, c) if v_switch is None else v_switch
    uniq, inv = np.unique(v.ravel(), return_inverse=True)
    vals = np.empty_like(uniq)
    low = uniq <= sw
    if np.any(low):
        vals[low] = ml_series_array(beta, c, uniq[low])
    if np.any(~low):
        vals[~low] = _integral_any(beta, c, uniq[~low], delta)
    return vals[inv].reshape(v.shape)
