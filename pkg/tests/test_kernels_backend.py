"""The numba kernels and the numpy fallback must agree to rounding."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractrace import TimeGrid, kernels
from fractrace.kernels import _numpy_impl

numba_impl = pytest.importorskip("fractrace.kernels._numba_impl")

NAMES = ("rl_apply", "adjoint_apply", "l1_apply", "marchaud_apply")


def _data(M, S, seed=0):
    rng = np.random.default_rng(seed)
    return np.ascontiguousarray(rng.standard_normal((M + 1, S)).cumsum(axis=0) / np.sqrt(M))


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("r", [1.0, 3.0, 8.0])
def test_backends_agree(name, r):
    t = TimeGrid(1.0, 256, r).t
    v = _data(256, 5)
    alpha = 0.37 if name != "rl_apply" else 1.37
    a = getattr(_numpy_impl, name)(t, v, alpha)
    b = getattr(numba_impl, name)(t, v, alpha)
    scale = max(1.0, float(np.max(np.abs(a))))
    assert np.max(np.abs(a - b)) <= 1e-12 * scale


def test_power_panel_small_ratio_branch():
    # P = int_{b-h}^b y^g dy and Q = int y^g (b - y) dy near x = h/b -> 0 and near 1
    b = np.array([1.0, 1.0, 1.0])
    h = np.array([1e-12, 0.2, 1.0])
    g = -0.6
    P, Q = _numpy_impl.power_panel(b, h, g)
    Pex = (b ** (g + 1) - (b - h) ** (g + 1)) / (g + 1)
    Qex = (b * Pex) - (b ** (g + 2) - (b - h) ** (g + 2)) / (g + 2)
    assert np.allclose(P[1:], Pex[1:], rtol=1e-13)
    assert np.allclose(Q[1:], Qex[1:], rtol=1e-12)
    # tiny panel: P ~ h b^g, Q ~ h^2 b^g / 2
    assert P[0] == pytest.approx(1e-12, rel=1e-10)
    assert Q[0] == pytest.approx(0.5e-24, rel=1e-10)
    for i in range(3):
        pn, qn = numba_impl._panel(b[i], h[i], g)
        assert pn == pytest.approx(P[i], rel=1e-14) and qn == pytest.approx(Q[i], rel=1e-14)


def test_env_flag_selects_numpy_backend():
    code = "from fractrace import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, FRACTRACE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    assert kernels.BACKEND in ("numba", "numpy")


def test_complex_values_split():
    t = TimeGrid(1.0, 32, 2.0).t
    re, im = _data(32, 1, 1)[:, 0], _data(32, 1, 2)[:, 0]
    z = kernels.rl_apply(t, re + 1j * im, 0.5)
    assert np.allclose(z.real, kernels.rl_apply(t, re, 0.5))
    assert np.allclose(z.imag, kernels.rl_apply(t, im, 0.5))


@settings(max_examples=20, deadline=None)
@given(alpha=st.floats(0.05, 0.95), r=st.floats(1.0, 8.0), M=st.integers(4, 96))
def test_backends_agree_random(alpha, r, M):
    t = TimeGrid(1.0, M, r).t
    v = _data(M, 2, M)
    for name in NAMES:
        a = getattr(_numpy_impl, name)(t, v, alpha)
        b = getattr(numba_impl, name)(t, v, alpha)
        assert np.max(np.abs(a - b)) <= 1e-11 * max(1.0, float(np.max(np.abs(a))))
