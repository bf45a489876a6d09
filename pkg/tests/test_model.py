import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from biphoton.errors import BadGrid, DomainError, MissingField, ParaxialWarning, ValidationError
from biphoton.model import (
    SpdcConfig,
    TransverseMomentumPair,
    amplitude_normalization,
    delta_kz,
    first_sideband_level,
    k_minus_amplitude,
    k_minus_density,
    k_minus_moment,
    pair_rate_scaling,
    sinc_gaussian_amplitude,
    x_minus_cdf,
    x_minus_density,
    x_minus_density_oracle,
    x_minus_moment,
)
from biphoton.numerics import Grid1D, integrate

CFG = SpdcConfig(lambda_p=390e-9, L_z=2e-3, sigma_p=1e-3)


@pytest.mark.parametrize("field", ["lambda_p", "L_z", "sigma_p"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_config_rejects_bad_values(field, bad):
    kw = dict(lambda_p=390e-9, L_z=2e-3, sigma_p=1e-3)
    kw[field] = bad
    with pytest.raises(ValidationError):
        SpdcConfig(**kw)


def test_config_derived():
    assert CFG.a == pytest.approx(2e-3 * 390e-9 / (4 * math.pi), rel=1e-15)
    assert CFG.k_p == pytest.approx(2 * math.pi / 390e-9, rel=1e-15)


def test_delta_kz():
    pair = TransverseMomentumPair((1.0, 2.0), (1.0, 2.0))
    assert delta_kz(pair, CFG) == 0.0
    dq = CFG.k_p / 100
    pair = TransverseMomentumPair((dq / 2, 0.0), (-dq / 2, 0.0))
    assert delta_kz(pair, CFG) == pytest.approx(-CFG.k_p / 20000, rel=1e-12)
    assert delta_kz(pair, CFG) == pytest.approx(-805.6, abs=0.1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1e5, 1e5), min_size=4, max_size=4))
def test_delta_kz_nonpositive(q):
    pair = TransverseMomentumPair(tuple(q[:2]), tuple(q[2:]))
    assert delta_kz(pair, CFG) <= 0.0


def test_paraxial_warning():
    big = 0.2 * CFG.k_p
    with pytest.warns(ParaxialWarning):
        delta_kz(TransverseMomentumPair((big, 0.0), (0.0, 0.0)), CFG)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        delta_kz(TransverseMomentumPair((0.01 * CFG.k_p, 0.0), (0.0, 0.0)), CFG)


def test_pair_rejects_nonfinite():
    with pytest.raises(ValidationError):
        TransverseMomentumPair((math.nan, 0.0), (0.0, 0.0))


def test_normalization_closed_form():
    # the two radial integrals have closed forms: pi/(4 sigma^2) and pi^2/(2a)
    expected = math.sqrt(8 * CFG.a * CFG.sigma_p**2 / math.pi**3)
    assert CFG.normalization == pytest.approx(expected, rel=1e-9)


def test_amplitude_peak_symmetry_and_zero():
    zero = TransverseMomentumPair((0.0, 0.0), (0.0, 0.0))
    assert sinc_gaussian_amplitude(zero, CFG) == pytest.approx(CFG.normalization)
    p = TransverseMomentumPair((3e4, -1e4), (5e3, 2e4))
    q = TransverseMomentumPair(p.q2, p.q1)
    assert sinc_gaussian_amplitude(p, CFG) == sinc_gaussian_amplitude(q, CFG)
    # first zero of the sinc along the difference coordinate
    d = math.sqrt(8 * math.pi**2 / (CFG.L_z * CFG.lambda_p))
    first = TransverseMomentumPair((d / 2, 0.0), (-d / 2, 0.0))
    assert abs(sinc_gaussian_amplitude(first, CFG)) < 1e-12 * CFG.normalization


def test_amplitude_normalisation_by_integration():
    # integrate |Phi|^2 in rotated polar coordinates with the package integrator
    a, sp = 2.0, 0.7
    n = amplitude_normalization(a, sp)
    plus = integrate(lambda r: 2 * math.pi * r * np.exp(-4 * sp**2 * r * r), 0, math.inf, rel_tol=1e-12)
    minus = integrate(
        lambda r: 2 * math.pi * r * np.sinc(a * r * r / math.pi) ** 2, 0, math.inf, rel_tol=1e-6
    )
    assert n**2 * plus * minus == pytest.approx(1.0, rel=1e-5)


def test_k_density_reference():
    assert k_minus_density(0.0, 2.0) == pytest.approx(0.59841, abs=5e-6)
    assert k_minus_density(0.0, 2.0) == pytest.approx(0.75 * math.sqrt(2 / math.pi), rel=1e-15)


def test_x_density_reference():
    # 0.2992067 is quoted truncated as 0.29920
    assert x_minus_density(0.0, 2.0) == pytest.approx(0.29920, abs=1e-5)
    assert x_minus_density(0.0, 2.0) == pytest.approx(3 / (4 * math.sqrt(2 * math.pi)), rel=1e-14)


def test_amplitude_squares_to_density():
    k = np.linspace(-5, 5, 101)
    assert np.allclose(k_minus_amplitude(k, 1.3) ** 2, k_minus_density(k, 1.3), rtol=1e-14, atol=0)


@pytest.mark.parametrize("f", [k_minus_density, x_minus_density])
def test_density_domain(f):
    with pytest.raises(DomainError):
        f(0.0, 0.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 50.0), st.floats(0.0, 200.0))
def test_densities_even_nonnegative(a, x):
    for f in (k_minus_density, x_minus_density):
        assert f(x, a) >= 0
        assert f(x, a) == pytest.approx(f(-x, a), rel=1e-14, abs=0)


@pytest.mark.parametrize("a", [0.5, 2.0, 10.0])
def test_normalisation_quadrature(a):
    assert k_minus_moment(0, a) == pytest.approx(1.0, rel=1e-8)
    assert x_minus_moment(0, a) == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("a", [0.5, 2.0, 10.0])
def test_second_moments(a):
    assert k_minus_moment(2, a) == pytest.approx(3 / (4 * a), rel=1e-6)
    assert x_minus_moment(2, a) == pytest.approx(9 * a / 5, rel=1e-6)


def test_uncertainty_product():
    a = 3.1
    prod = math.sqrt(k_minus_moment(2, a) * x_minus_moment(2, a))
    assert prod == pytest.approx(math.sqrt(27 / 20), rel=1e-7)
    assert prod >= 0.5


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 20.0), st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
def test_scaling_law(a, s, k):
    # rho(k; a) = sqrt(s) rho(sqrt(s) k; a / s)
    lhs = k_minus_density(k, a)
    rhs = math.sqrt(s) * k_minus_density(math.sqrt(s) * k, a / s)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("a", [0.5, 2.0, 10.0])
def test_fourier_oracle_matches_closed_form(a):
    half = 10 * math.sqrt(a)
    grid = Grid1D.centered(4096, 2 * half / 4096)
    out = x_minus_density_oracle(a, grid)
    x = grid.points
    core = np.abs(x) <= 5 * math.sqrt(a)
    assert np.max(np.abs(out.values[core] - x_minus_density(x[core], a))) < 1e-4
    # symmetric about zero (grid index n//2 is x = 0)
    v = out.values
    assert np.max(np.abs(v[1:] - v[1:][::-1])) < 1e-10
    assert np.sum(v) * grid.step == pytest.approx(1.0, abs=1e-4 + 2 * a**1.5 / (math.sqrt(math.pi) * half**3))


def test_fourier_oracle_rejects_huge_grid():
    grid = Grid1D.centered(4096, 1.0)
    with pytest.raises(BadGrid):
        x_minus_density_oracle(2.0, grid, max_fft=1 << 12)


def test_cdf_matches_quadrature_and_is_symmetric():
    a = 2.0
    for x in (0.3, 1.0, 4.0, 20.0):
        direct = 0.5 + integrate(lambda t: x_minus_density(t, a), 0.0, x, rel_tol=1e-12)
        assert x_minus_cdf(x, a) == pytest.approx(direct, abs=1e-10)
        assert x_minus_cdf(-x, a) == pytest.approx(1 - direct, abs=1e-10)
    assert x_minus_cdf(0.0, a) == 0.5
    assert x_minus_cdf(1e6, a) == pytest.approx(1.0, abs=1e-15)


def test_cdf_monotone():
    x = np.linspace(-200, 200, 20001)
    c = x_minus_cdf(x, 1.0)
    assert np.all(np.diff(c) >= -1e-14)


def test_first_sideband_reported():
    # the level near 5% is reported, not pinned
    level = first_sideband_level(2.0)
    assert 0.04 < level < 0.06
    assert first_sideband_level(7.0) == pytest.approx(level, rel=1e-8)


def test_pair_rate_scaling():
    ref = SpdcConfig(390e-9, 2e-3, 1e-3, d_eff=2e-12, P_p=0.1)
    assert pair_rate_scaling(ref, ref) == 1.0
    assert pair_rate_scaling(SpdcConfig(390e-9, 4e-3, 1e-3, d_eff=2e-12, P_p=0.1), ref) == pytest.approx(4)
    assert pair_rate_scaling(SpdcConfig(390e-9, 2e-3, 1e-3, d_eff=2e-12, P_p=0.2), ref) == pytest.approx(2)
    with pytest.raises(MissingField):
        pair_rate_scaling(CFG, ref)


def test_k_density_is_distribution_of_a_sampled_variable():
    # sanity: the sinc^2 density has the stated variance only through its far tail;
    # a truncated variance is visibly smaller
    a = 1.0
    trunc = integrate(lambda k: k * k * k_minus_density(k, a), -3.0, 3.0, rel_tol=1e-12)
    assert trunc < 3 / (4 * a)
    assert stats.norm.cdf(0) == 0.5
