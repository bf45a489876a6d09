import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from biphoton.errors import BadGrid, NoCrossing, NonConvergence
from biphoton.numerics import (
    Grid1D,
    dft_1d,
    fresnel_c,
    fresnel_s,
    full_width_at_fraction,
    integrate,
    sinc,
)


def test_grid_validation():
    with pytest.raises(BadGrid):
        Grid1D(1.0, 0.0, 10)
    with pytest.raises(BadGrid):
        Grid1D(0.0, 1.0, 1)
    with pytest.raises(BadGrid):
        Grid1D(0.0, 1.0, 4, values=np.zeros(3))


def test_centered_grid_has_zero_at_middle():
    g = Grid1D.centered(8, 0.5)
    assert g.points[4] == 0.0
    assert g.step == pytest.approx(0.5)


def test_conjugate_spacing():
    g = Grid1D.centered(64, 0.1)
    k = g.conjugate()
    assert k.step == pytest.approx(2 * math.pi / (64 * 0.1))
    assert k.points[32] == 0.0


def test_sinc_unnormalised():
    x = np.array([0.0, math.pi, 1.0])
    assert np.allclose(sinc(x), [1.0, 0.0, math.sin(1.0)], atol=1e-15)


def test_fresnel_convention_is_half_pi():
    # C(x) = int_0^x cos(pi t^2 / 2) dt
    direct = integrate(lambda t: np.cos(math.pi * t * t / 2), 0.0, 1.3, rel_tol=1e-13)
    assert fresnel_c(1.3) == pytest.approx(direct, rel=1e-12)
    direct = integrate(lambda t: np.sin(math.pi * t * t / 2), 0.0, 1.3, rel_tol=1e-13)
    assert fresnel_s(1.3) == pytest.approx(direct, rel=1e-12)


def test_fresnel_limits():
    assert fresnel_c(1e8) == pytest.approx(0.5, abs=1e-8)
    assert fresnel_s(1e8) == pytest.approx(0.5, abs=1e-8)


@pytest.mark.parametrize(
    "f, lo, hi, exact",
    [
        (lambda x: x**2, 0.0, 1.0, 1 / 3),
        (lambda x: np.exp(-x * x), -math.inf, math.inf, math.sqrt(math.pi)),
        (lambda x: np.exp(-x), 0.0, math.inf, 1.0),
        (lambda x: 1 / (1 + x * x), -math.inf, 0.0, math.pi / 2),
        (lambda x: np.sqrt(x), 0.0, 1.0, 2 / 3),
    ],
)
def test_integrate_known(f, lo, hi, exact):
    assert integrate(f, lo, hi, rel_tol=1e-12) == pytest.approx(exact, rel=1e-11)


def test_integrate_reversed_limits_flip_sign():
    assert integrate(np.cos, 1.0, 0.0) == pytest.approx(-math.sin(1.0), rel=1e-12)


def test_integrate_oscillatory_sinc_squared():
    # int sinc^2 over the line is pi
    val = integrate(lambda x: sinc(x) ** 2, -math.inf, math.inf, rel_tol=1e-7)
    assert val == pytest.approx(math.pi, rel=1e-6)


def test_integrate_reports_nonconvergence():
    with pytest.raises(NonConvergence):
        integrate(lambda x: np.sin(1 / x), 1e-9, 1.0, rel_tol=1e-14, max_intervals=200)


def test_integrate_rejects_nonfinite():
    with pytest.raises(NonConvergence):
        integrate(lambda x: 1 / x, -1.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-3.0, 3.0))
def test_gaussian_integral_property(width, centre):
    val = integrate(lambda x: np.exp(-0.5 * ((x - centre) / width) ** 2), -math.inf, math.inf, rel_tol=1e-11)
    assert val == pytest.approx(math.sqrt(2 * math.pi) * width, rel=1e-10)


def test_dft_requires_power_of_two():
    g = Grid1D.centered(100, 0.1, np.ones(100))
    with pytest.raises(BadGrid):
        dft_1d(g)


def test_dft_of_gaussian_is_gaussian():
    n, dx = 512, 0.05
    g = Grid1D.centered(n, dx)
    x = g.points
    psi = np.exp(-x * x / 2)
    out = dft_1d(g.with_values(psi))
    k = out.points
    # continuous transform (1/sqrt(2 pi)) int psi e^{-ikx} dx = e^{-k^2/2}
    scaled = out.values * math.sqrt(n) * dx / math.sqrt(2 * math.pi)
    assert np.max(np.abs(scaled - np.exp(-k * k / 2))) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 9), st.integers(0, 2**31 - 1))
def test_dft_is_unitary_and_invertible(log_n, seed):
    n = 2**log_n
    rng = np.random.default_rng(seed)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    g = Grid1D.centered(n, 0.3, v)
    fwd = dft_1d(g)
    assert np.linalg.norm(fwd.values) == pytest.approx(np.linalg.norm(v), rel=1e-12)
    back = dft_1d(fwd, "inverse")
    assert np.allclose(back.values, v, atol=1e-12)


def test_fwhm_of_gaussian():
    w = full_width_at_fraction(lambda x: math.exp(-x * x / 2), 0.5, (-10, 10))
    assert w == pytest.approx(2 * math.sqrt(2 * math.log(2)), rel=1e-10)


def test_fwhm_off_centre_peak():
    w = full_width_at_fraction(lambda x: math.exp(-((x - 1.7) ** 2) / 8), 0.25, (-20, 20))
    assert w == pytest.approx(2 * math.sqrt(2 * 4 * math.log(4)), rel=1e-10)


def test_fwhm_no_crossing():
    with pytest.raises(NoCrossing):
        full_width_at_fraction(lambda x: 1.0 + 0 * x, 0.5, (-1, 1))


def test_sinc_half_pi():
    assert sinc(math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1e4, 1e4, allow_nan=False))
def test_sinc_even_and_bounded(x):
    assert sinc(x) == sinc(-x)
    assert abs(sinc(x)) <= 1.0


@pytest.mark.parametrize("n", [1, 2, 7, -3, 100])
def test_sinc_zeros(n):
    assert abs(sinc(n * math.pi)) < 1e-14


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 60.0))
def test_fresnel_odd_and_bounded(x):
    assert fresnel_c(-x) == -fresnel_c(x)
    assert fresnel_s(-x) == -fresnel_s(x)
    assert -0.9 <= fresnel_c(x) <= 0.9
    assert -0.9 <= fresnel_s(x) <= 0.9


def test_fresnel_reference_values():
    assert fresnel_c(0.0) == 0.0 and fresnel_s(0.0) == 0.0
    assert fresnel_c(50.0) == pytest.approx(0.5, abs=1e-2)
    assert fresnel_c(1.0) == pytest.approx(0.779893, abs=1e-6)
    c, s = special.fresnel(2.5)[::-1]
    assert (fresnel_c(2.5), fresnel_s(2.5)) == (c, s)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.floats(0.3, 3.0))
def test_even_integrand_symmetric_limits(coeffs, width):
    def f(x):
        poly = sum(c * x ** (2 * i) for i, c in enumerate(coeffs))
        return poly * np.exp(-(x / width) ** 2)

    full = integrate(f, -4.0, 4.0, rel_tol=1e-12, abs_tol=1e-13)
    half = integrate(f, 0.0, 4.0, rel_tol=1e-12, abs_tol=1e-13)
    assert full == pytest.approx(2 * half, rel=1e-10, abs=1e-12)


def test_dft_delta_is_flat():
    n = 256
    v = np.zeros(n, dtype=complex)
    v[n // 2] = 1.0  # the sample at x = 0
    out = dft_1d(Grid1D.centered(n, 1.0, v))
    assert np.allclose(np.abs(out.values), 1 / math.sqrt(n), atol=1e-15)


def test_dft_gaussian_width_on_4096_grid():
    sigma = 0.7
    g = Grid1D.centered(4096, 0.01)
    x = g.points
    # amplitude whose modulus squared has position width sigma
    amp = np.exp(-x * x / (4 * sigma**2))
    out = dft_1d(g.with_values(amp))
    k = out.points
    dens = np.abs(out.values) ** 2
    width = math.sqrt(np.sum(dens * k * k) / np.sum(dens))
    assert width == pytest.approx(1 / (2 * sigma), rel=1e-10)


def test_width_at_inverse_sqrt_e_is_two_sigma():
    sigma = 1.9
    w = full_width_at_fraction(lambda x: math.exp(-x * x / (2 * sigma**2)), math.exp(-0.5), (-30, 30))
    assert w == pytest.approx(2 * sigma, rel=1e-10)


def test_fwhm_of_exact_difference_density():
    from biphoton.model import x_minus_density

    a = 2.0
    w = full_width_at_fraction(lambda x: x_minus_density(x, a), 0.5, (-40, 40))
    # independent: brentq on the half-maximum crossing of the closed form
    from scipy.optimize import brentq

    half = 0.5 * x_minus_density(0.0, a)
    root = brentq(lambda x: x_minus_density(x, a) - half, 0.1, 5.0, xtol=1e-14)
    assert w == pytest.approx(2 * root, rel=1e-10)
