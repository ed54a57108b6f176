"""Quadrature helpers shared across modules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ParameterError
from .grid import TimeGrid


@lru_cache(maxsize=32)
def gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (x + 1.0), 0.5 * w


def composite_gl(a: float, b: float, panels: int, m: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = gauss_legendre(m)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    return nodes, weights


def power_panel_weights(t: np.ndarray, mu: float) -> np.ndarray:
    """Nodal weights w_i with sum_i w_i g(t_i) = int_0^T g(t) t^mu dt for piecewise-linear g.

    The weight t^mu is integrated exactly on every panel.
    """
    if mu <= -1:
        raise ParameterError(f"time weight exponent mu must exceed -1, got {mu}")
    t = np.asarray(t, dtype=float)
    a, b = t[:-1], t[1:]
    h = b - a
    p0 = (b ** (mu + 1) - a ** (mu + 1)) / (mu + 1)
    p1 = (b ** (mu + 2) - a ** (mu + 2)) / (mu + 2)
    left = (b * p0 - p1) / h
    right = (p1 - a * p0) / h
    w = np.zeros_like(t)
    w[:-1] += left
    w[1:] += right
    return w


def time_weights(tgrid: TimeGrid, mu: float, start: int = 0) -> np.ndarray:
    """Weights for int_{t_start}^T g t^mu dt; entries before ``start`` are zero."""
    w = np.zeros(tgrid.M + 1)
    w[start:] = power_panel_weights(tgrid.t[start:], mu)
    return w
