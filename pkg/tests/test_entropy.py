import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from tfim_magic.entropy import (
    CRITICAL_SLOPE_JUMP,
    FERRO_M2_DENSITY,
    channel_terms,
    derivative_scan,
    m2_channel_terms,
    magic_m2,
    stabilizer_renyi,
    thermo_density,
)
from tfim_magic.errors import DomainError
from tfim_magic.model import ModelParams, channel_amplitudes

sizes = st.integers(1, 300).map(lambda m: 2 * m)
fields = st.floats(0.0, 20.0, allow_nan=False)
renyi = st.floats(0.2, 6.0).filter(lambda n: abs(n - 1) > 1e-3)


def literal_mn(params, n):
    """Direct transcription: ln(prod_k (1 + |cos|^2n + |sin|^2n) / 2) / (1 - n)."""
    a = channel_amplitudes(params)
    prod = np.prod((1 + a.abs_cos ** (2 * n) + a.abs_sin ** (2 * n)) / 2)
    return math.log(prod) / (1 - n)


def literal_m2(params):
    a = channel_amplitudes(params)
    return -float(np.sum(np.log((7 + np.cos(4 * a.theta)) / 8)))


def test_ferro_constant_closed_form():
    # int_0^pi ln(a + b cos x) dx = pi ln((a + sqrt(a^2 - b^2)) / 2), a = 7/8, b = 1/8
    a, b = 7 / 8, 1 / 8
    assert FERRO_M2_DENSITY == pytest.approx(-0.5 * math.log((a + math.sqrt(a * a - b * b)) / 2))
    assert FERRO_M2_DENSITY == pytest.approx(0.069336, abs=1e-6)


@pytest.mark.parametrize("N, g, expected", [(2, 1.0, math.log(4 / 3)), (2, 0.0, 0.0)])
def test_m2_small_examples(N, g, expected):
    assert magic_m2(ModelParams(N, g)).M_n == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("n", [0.5, 2.0, 3.0, 7.5])
def test_bell_channel_has_no_magic(n):
    assert stabilizer_renyi(ModelParams(2, 0.0), n).M_n == pytest.approx(0.0, abs=1e-15)


def test_ferro_plateau_at_large_n():
    for g in (0.2, 0.5, 0.8):
        assert magic_m2(ModelParams(2000, g)).per_site == pytest.approx(FERRO_M2_DENSITY, abs=1e-3)


@pytest.mark.parametrize("n", [2.0, 3.0])
def test_stabilizer_limit(n):
    assert stabilizer_renyi(ModelParams(2000, 1e6), n).per_site < 1e-10


def test_stabilizer_limit_below_one():
    # |sin theta|^(2n) ~ g^(-2n) dominates for n < 1, so the decay is slower
    vals = [stabilizer_renyi(ModelParams(2000, g), 0.5).per_site for g in (1e4, 1e5, 1e6)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[1] / vals[2] == pytest.approx(10.0, rel=1e-3)


@settings(max_examples=60, deadline=None)
@given(sizes, fields, renyi)
def test_matches_literal_form(N, g, n):
    p = ModelParams(N, g)
    lit = literal_mn(p, n)
    assert stabilizer_renyi(p, n).M_n == pytest.approx(lit, rel=1e-9, abs=1e-11)


@settings(max_examples=60, deadline=None)
@given(sizes, fields)
def test_m2_identity_and_literal(N, g):
    p = ModelParams(N, g)
    m2 = magic_m2(p)
    assert m2.M_n == pytest.approx(stabilizer_renyi(p, 2).M_n, rel=1e-12, abs=1e-12)
    assert m2.M_n == pytest.approx(literal_m2(p), rel=1e-10, abs=1e-12)
    assert m2.M_n >= 0
    assert m2.per_site * N == m2.M_n


def test_stable_terms_keep_relative_precision():
    theta = np.array([1e-6, 1e-9, 1e-12])
    # small-angle leading term: sin^2(2 theta)/4 ~ theta^2
    np.testing.assert_allclose(m2_channel_terms(theta), theta**2, rtol=1e-5)
    np.testing.assert_allclose(channel_terms(theta, 2.0), theta**2, rtol=1e-5)
    assert np.all(channel_terms(theta, 3.0) > 0)


@pytest.mark.parametrize("n", [1.0, 0.0, -1.0, float("nan")])
def test_invalid_renyi_index(n):
    with pytest.raises(DomainError):
        stabilizer_renyi(ModelParams(4, 0.5), n)


def test_volume_law_ratio():
    for g in (0.3, 0.8, 1.5, 3.0):
        ratio = magic_m2(ModelParams(1024, g)).M_n / magic_m2(ModelParams(512, g)).M_n
        assert ratio == pytest.approx(2.0, rel=1e-2)


def _quad_density(g, n):
    def f(k):
        theta = math.atan2(math.sin(k), g - math.cos(k))
        c, s = abs(math.cos(theta)), abs(math.sin(theta))
        return math.log((1 + c ** (2 * n) + s ** (2 * n)) / 2) / (1 - n)

    points = [abs(g - 1)] if 0 < abs(g - 1) < math.pi else None
    val, _ = quad(f, 0, math.pi, points=points, limit=400, epsabs=1e-13, epsrel=1e-12)
    return val / (2 * math.pi)


@pytest.mark.parametrize("g", [0.0, 0.3, 0.97, 1.0, 1.04, 1.5, 3.0])
@pytest.mark.parametrize("n", [2.0, 3.0, 0.5])
def test_thermo_against_scipy_quad(g, n):
    t = thermo_density(g, n)
    assert t.converged
    assert t.value == pytest.approx(_quad_density(g, n), abs=1e-9)


def test_thermo_ferro_plateau():
    for g in np.linspace(0, 0.95, 20):
        assert thermo_density(g, 2).value == pytest.approx(FERRO_M2_DENSITY, abs=1e-8)


def test_thermo_paramagnetic_coefficient():
    for g in (1e2, 1e3, 1e4):
        assert thermo_density(g, 2).value * 4 * g * g == pytest.approx(1.0, rel=1e-3)


@pytest.mark.parametrize("g", [0.3, 0.8, 1.2, 2.0])
def test_finite_size_approaches_thermo(g):
    assert magic_m2(ModelParams(4096, g)).per_site == pytest.approx(
        thermo_density(g, 2).value, abs=1e-4
    )


def test_derivative_jump_finite_n():
    d = derivative_scan(100_000, 1.0, 0.01)
    assert d.right_extrap == pytest.approx(CRITICAL_SLOPE_JUMP, abs=1e-2)
    assert d.left_extrap == pytest.approx(0.0, abs=1e-2)


def test_derivative_jump_thermo():
    d = derivative_scan(None, 1.0, 0.01)
    assert d.right_extrap - d.left_extrap == pytest.approx(CRITICAL_SLOPE_JUMP, abs=1e-3)


def test_derivative_smooth_region():
    d = derivative_scan(100_000, 0.5, 0.01)
    assert d.left_extrap == pytest.approx(d.right_extrap, abs=1e-6)
    d = derivative_scan(2000, 2.0, 0.01)
    assert d.left_extrap == pytest.approx(d.right_extrap, abs=1e-6)


def test_derivative_rejects_bad_step():
    with pytest.raises(DomainError):
        derivative_scan(100, 1.0, 0.0)
    with pytest.raises(DomainError):
        derivative_scan(100, 0.001, 0.01)
