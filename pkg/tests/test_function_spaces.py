import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractrace import ParameterError, SpaceGrid, TimeGrid
from fractrace.function_spaces import (WeightSpec, ap_constant_estimate, bessel_potential,
                                       besov_norm, besov_norm_differences, build_lp_family,
                                       interpolation_norm, k_functional, lp_norm, mixed_norm,
                                       sobolev_norm)


@pytest.fixture(scope="module")
def torus():
    return SpaceGrid(1, math.pi, 128)


def test_lp_norm_of_cosine(torus):
    f = np.cos(torus.x)
    assert float(lp_norm(f, torus, 2.0)) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert float(lp_norm(f, torus, np.inf)) == pytest.approx(1.0)


def test_weight_validation_message():
    with pytest.raises(ParameterError, match=r"mu in \(-1, q-1\)"):
        WeightSpec(1.0, 0.0).validate(2.0, 2.0, 1)
    with pytest.raises(ParameterError):
        WeightSpec(0.0, -1.5).validate(2.0, 2.0, 1)
    WeightSpec(0.5, 0.5).validate(2.0, 2.0, 1)


def test_mixed_norm_of_separable_field():
    sg, tg = SpaceGrid(1, math.pi, 64), TimeGrid(1.0, 256, 1.0)
    vals = np.outer(tg.t, np.cos(sg.x))
    # ||t cos||_{L_{2,2,t^mu}} = sqrt(pi / (3 + mu)); t^2 is integrated exactly on panels
    # of its linear interpolant, so the quadrature error is O(h^2)
    got = mixed_norm(vals, tg, sg, 2.0, 2.0, WeightSpec(0.5, 0.0))
    assert got == pytest.approx(math.sqrt(math.pi / 3.5), rel=1e-5)


def test_partition_of_unity(torus):
    fam = build_lp_family(torus)
    assert fam.partition_error() < 1e-14
    assert all(np.all(s >= -1e-15) for s in fam.shells)


def test_single_shell_besov_norm(torus):
    # the shells are dilates of one profile, so consecutive dyadic modes differ by 2^s
    norms = [besov_norm(np.cos(2.0**j * torus.x), 0.5, 2, 2, build_lp_family(torus)) for j in range(1, 5)]
    ratios = np.array(norms[1:]) / np.array(norms[:-1])
    assert np.allclose(ratios, 2.0**0.5, rtol=1e-12)


def test_sobolev_norm_of_mode(torus):
    f = np.cos(3 * torus.x)
    assert sobolev_norm(f, 2.0, 2.0, torus) == pytest.approx(10 * math.sqrt(math.pi), rel=1e-12)
    assert np.allclose(bessel_potential(bessel_potential(f, 1.0, torus), -1.0, torus), f)


def test_difference_norm_of_a_mode():
    g = SpaceGrid(1, math.pi, 64)
    # ||D_h^2 cos(kx)||_2^2 = 16 sin^4(kh/2) pi; against |h|^-2 on R this gives
    # 2 pi 16 (k/2) int_0^inf sin^4(x) / x^2 dx = 4 pi^2 k
    k = 2
    val = besov_norm_differences(np.cos(k * g.x), 0.5, 2, 2, g)
    assert val == pytest.approx(math.sqrt(math.pi) + 2 * math.pi * math.sqrt(k), rel=1e-6)


def test_k_functional_limits(torus):
    f = np.cos(2 * torus.x)
    l2 = float(lp_norm(f, torus, 2.0))
    assert k_functional(f, 1e-12, 2.0, torus) < 1e-9
    assert k_functional(f, 1e6, 2.0, torus) == pytest.approx(l2)
    # interpolation norm of a single mode scales like (1 + |xi|^2)^theta
    a = interpolation_norm(np.cos(2 * torus.x), 0.5, 2, 2, torus)
    b = interpolation_norm(np.cos(8 * torus.x), 0.5, 2, 2, torus)
    assert 2.0 < b / a < 8.0


def test_ap_constant_unit_weight_is_one():
    assert ap_constant_estimate(SpaceGrid(1, 4.0, 64), 0.0) == 1.0
    assert ap_constant_estimate(SpaceGrid(1, 4.0, 64), 0.5) > 1.0


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31), s=st.floats(0.2, 1.8))
def test_besov_and_difference_norms_equivalent(seed, s):
    g = SpaceGrid(1, math.pi, 64)
    rng = np.random.default_rng(seed)
    f = sum(rng.standard_normal() * np.cos(k * g.x + rng.uniform(0, 6)) for k in range(1, 20))
    r = besov_norm(f, s, 2, 2, build_lp_family(g)) / besov_norm_differences(f, s, 2, 2, g)
    assert 0.1 < r < 10


@settings(max_examples=20, deadline=None)
@given(s=st.floats(-2, 2), c=st.floats(0.1, 5))
def test_norms_are_homogeneous(s, c):
    g = SpaceGrid(1, math.pi, 32)
    f = np.sin(g.x) + 0.3 * np.cos(5 * g.x)
    fam = build_lp_family(g)
    assert besov_norm(c * f, s, 2, 2, fam) == pytest.approx(c * besov_norm(f, s, 2, 2, fam), rel=1e-12)
    assert sobolev_norm(c * f, s, 2, g) == pytest.approx(c * sobolev_norm(f, s, 2, g), rel=1e-12)
