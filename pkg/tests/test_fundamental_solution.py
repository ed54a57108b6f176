import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractrace import ParameterError, ResolutionWarning, SpaceGrid
from fractrace.fundamental_solution import (KernelSpec, check_decay, check_scaling,
                                            exact_second_moment, kernel_field, kernel_hat,
                                            kernel_mass, kernel_tilde_hat, second_moments)


def test_symbol_at_zero_and_heat_case():
    xi2 = np.array([0.0, 1.0, 4.0])
    assert np.allclose(kernel_hat(0.7, 2.0, xi2)[0], 1.0)
    assert np.allclose(kernel_hat(1.0, 0.5, xi2), np.exp(-0.5 * xi2), atol=1e-14)
    # E_{1/2}(-1) = e erfc(1)
    assert kernel_hat(0.5, 1.0, np.array([1.0]))[0] == pytest.approx(0.42758357615580700442, abs=1e-12)


def test_velocity_kernel_symbol_at_zero_is_t():
    assert kernel_tilde_hat(1.5, 0.8, np.array([0.0]))[0] == pytest.approx(0.8, rel=1e-14)


def test_heat_kernel_profile():
    g = SpaceGrid(1, 16.0, 256)
    P = kernel_field(KernelSpec(1.0, 0.1, g))
    assert np.allclose(P, np.exp(-g.x**2 / 0.4) / math.sqrt(0.4 * math.pi), atol=1e-8)


def test_subdiffusion_kernel_nonnegative():
    g = SpaceGrid(1, 16.0, 1024)
    assert kernel_field(KernelSpec(0.5, 1.0, g)).min() > -1e-6


def test_unresolved_kernel_warns():
    with pytest.warns(ResolutionWarning):
        kernel_field(KernelSpec(0.5, 0.01, SpaceGrid(1, 16.0, 64)))


def test_scaling_identity_example():
    g = SpaceGrid(1, 16.0, 2048)
    assert check_scaling(1.0, 0.5, g) < 1e-12
    assert check_scaling(0.5, 0.5, g) < 1e-3
    assert check_scaling(0.5, 1.0, g) < 1e-13


def test_gaussian_decay_rate():
    rep = check_decay(1.0, SpaceGrid(1, 16.0, 512))
    assert rep.sigma == pytest.approx(0.25, rel=1e-6)
    assert rep.r_squared > 0.999999


def test_second_moment_matches_symbol_curvature():
    g = SpaceGrid(1, 32.0, 1024)
    times = [0.5, 1.0, 2.0]
    got = second_moments(0.6, times, g)
    ref = [exact_second_moment(0.6, t, 1) for t in times]
    assert np.allclose(got, ref, rtol=1e-4)


def test_bad_time():
    with pytest.raises(ParameterError):
        kernel_field(KernelSpec(0.5, 0.0, SpaceGrid(1, 4.0, 16)))


@settings(max_examples=20, deadline=None)
@given(beta=st.floats(0.1, 1.9), t=st.floats(0.1, 5.0))
def test_unit_mass(beta, t):
    assert kernel_mass(KernelSpec(beta, t, SpaceGrid(1, 16.0, 128))) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(beta=st.floats(0.1, 0.99), t=st.floats(0.1, 5.0))
def test_subdiffusion_symbol_in_unit_interval(beta, t):
    s = kernel_hat(beta, t, np.linspace(0.0, 400.0, 81))
    assert np.all(s > 0) and np.all(s <= 1.0 + 1e-15) and np.all(np.diff(s) <= 1e-15)
