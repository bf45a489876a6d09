"""Crystal-plane biphoton model for degenerate collinear type-I SPDC.

Scale parameter ``a = L_z * lambda_p / (4 pi)`` (m^2) sets every width in the
rotated coordinates ``k- = (k1x - k2x)/sqrt(2)`` and ``x- = (x1 - x2)/sqrt(2)``:

* ``rho(k-) = 3/4 sqrt(a/pi) sinc^2(a k-^2)``,  <k-^2> = 3/(4a)
* ``rho(x-)``, its Fourier partner, in closed form through Fresnel integrals,
  <x-^2> = 9a/5.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import integrate as sp_integrate
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import minimize_scalar

from .errors import BadGrid, DomainError, MissingField, ParaxialWarning, ValidationError
from .numerics import Grid1D, _dft, fresnel_c, fresnel_s, integrate, sinc

PARAXIAL_LIMIT = 0.1


@dataclass(frozen=True)
class SpdcConfig:
    """Pump and crystal parameters (SI units).

    ``sigma_p`` is the standard deviation of (x1 + x2)/2 at the crystal.
    ``d_eff`` (m/V) and ``P_p`` (W) are only needed for brightness ratios.
    """

    lambda_p: float
    L_z: float
    sigma_p: float
    d_eff: float | None = None
    P_p: float | None = None

    def __post_init__(self):
        for name in ("lambda_p", "L_z", "sigma_p"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
        for name in ("d_eff", "P_p"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be positive when given, got {value!r}")

    @property
    def a(self) -> float:
        return self.L_z * self.lambda_p / (4 * math.pi)

    @property
    def k_p(self) -> float:
        return 2 * math.pi / self.lambda_p

    @cached_property
    def normalization(self) -> float:
        return amplitude_normalization(self.a, self.sigma_p)


@dataclass(frozen=True)
class TransverseMomentumPair:
    """Transverse wavevectors (rad/m) of signal ``q1`` and idler ``q2``."""

    q1: tuple[float, float]
    q2: tuple[float, float]

    def __post_init__(self):
        q1 = np.asarray(self.q1, dtype=float)
        q2 = np.asarray(self.q2, dtype=float)
        if q1.shape != (2,) or q2.shape != (2,):
            raise ValidationError("q1 and q2 must be 2-vectors")
        if not (np.all(np.isfinite(q1)) and np.all(np.isfinite(q2))):
            raise ValidationError("momentum components must be finite")
        object.__setattr__(self, "q1", q1)
        object.__setattr__(self, "q2", q2)

    def is_paraxial(self, k_p: float) -> bool:
        q = max(np.hypot(*self.q1), np.hypot(*self.q2))
        return q / k_p <= PARAXIAL_LIMIT


def _check_paraxial(pair: TransverseMomentumPair, config: SpdcConfig) -> None:
    if not pair.is_paraxial(config.k_p):
        warnings.warn(
            f"|q|/k_p exceeds {PARAXIAL_LIMIT}; small-angle phase mismatch is inaccurate",
            ParaxialWarning,
            stacklevel=3,
        )


def delta_kz(pair: TransverseMomentumPair, config: SpdcConfig) -> float:
    """Small-angle longitudinal phase mismatch, -|q1 - q2|^2 / (2 k_p)."""
    _check_paraxial(pair, config)
    dq = pair.q1 - pair.q2
    return -float(dq @ dq) / (2 * config.k_p)


def _sinc_squared_half_line(u_split: float = 200.0) -> float:
    """int_0^inf sinc^2(u) du by quadrature on [0, U] plus an exact tail."""
    head = integrate(lambda u: sinc(u) ** 2, 0.0, u_split, rel_tol=1e-13)
    # sin^2 u / u^2 = (1 - cos 2u) / (2 u^2)
    osc, _ = sp_integrate.quad(lambda u: 1.0 / u**2, u_split, np.inf, weight="cos", wvar=2.0)
    return head + 1.0 / (2 * u_split) - 0.5 * osc


@lru_cache(maxsize=256)
def amplitude_normalization(a: float, sigma_p: float) -> float:
    """Constant N making |Phi(q1, q2)|^2 integrate to one over both planes.

    In rotated 2-vectors k+-, the modulus squared factorises into
    exp(-4 sigma_p^2 |k+|^2) and sinc^2(a |k-|^2); both radial integrals are
    done numerically.
    """
    plus = 2 * math.pi * integrate(
        lambda r: r * np.exp(-4 * sigma_p**2 * r**2), 0.0, np.inf, rel_tol=1e-13
    )
    # 2 pi int r sinc^2(a r^2) dr = (pi / a) int_0^inf sinc^2(u) du
    minus = math.pi / a * _sinc_squared_half_line()
    return 1.0 / math.sqrt(plus * minus)


def sinc_gaussian_amplitude(pair: TransverseMomentumPair, config: SpdcConfig) -> float:
    """Normalised paraxial amplitude N sinc(a |q1-q2|^2 / 2) exp(-sigma_p^2 |q1+q2|^2)."""
    _check_paraxial(pair, config)
    dq = pair.q1 - pair.q2
    sq = pair.q1 + pair.q2
    arg = config.L_z * config.lambda_p * float(dq @ dq) / (8 * math.pi)
    return config.normalization * float(sinc(arg)) * math.exp(-config.sigma_p**2 * float(sq @ sq))


def _check_a(a: float) -> None:
    if not a > 0:
        raise DomainError(f"scale parameter a must be positive, got {a}")


def k_minus_density(k_minus, a: float):
    """Marginal density of k- : 3/4 sqrt(a/pi) sinc^2(a k-^2)."""
    _check_a(a)
    k = np.asarray(k_minus, dtype=float)
    return 0.75 * np.sqrt(a / np.pi) * sinc(a * k * k) ** 2


def x_minus_density(x_minus, a: float):
    """Closed-form density of x- (Fourier partner of the sinc amplitude)."""
    _check_a(a)
    x = np.asarray(x_minus, dtype=float)
    u = x / np.sqrt(2 * np.pi * a)
    theta = x * x / (4 * a)
    bracket = x * np.sqrt(2 * np.pi) * (fresnel_s(u) - fresnel_c(u)) + 2 * np.sqrt(a) * (
        np.cos(theta) + np.sin(theta)
    )
    return 3.0 / (16.0 * np.sqrt(np.pi * a**3)) * bracket**2


def k_minus_amplitude(k_minus, a: float):
    """Signed momentum amplitude whose square is :func:`k_minus_density`."""
    k = np.asarray(k_minus, dtype=float)
    return math.sqrt(0.75) * (a / math.pi) ** 0.25 * sinc(a * k * k)


def _fourier_tail(power: float, start: float, omega: float, weight: str) -> float:
    """int_start^inf t^power * cos/sin(omega t) dt (QUADPACK Fourier integral)."""
    value, _ = sp_integrate.quad(
        lambda t: t**power, start, np.inf, weight=weight, wvar=omega, limlst=200
    )
    return value


def k_minus_moment(order: int, a: float, split: float = 400.0) -> float:
    """<k-^order> for order 0 or 2, by quadrature with an exact oscillatory tail.

    The range is split at a k^2 = ``split``; beyond it sinc^2 is written as
    (1 - cos(2 a k^2)) / (2 a^2 k^4), the smooth part integrated in closed form
    and the cosine part as a Fourier integral in t = k^2.
    """
    if order not in (0, 2):
        raise ValueError("only the 0th and 2nd moments are finite")
    _check_a(a)
    K = math.sqrt(split / a)
    head = integrate(lambda k: k**order * k_minus_density(k, a), 0.0, K, rel_tol=1e-12)
    c = 0.75 * math.sqrt(a / math.pi) / (2 * a * a)
    smooth = K ** (order - 3) / (3 - order)
    osc = 0.5 * _fourier_tail((order - 5) / 2, K * K, 2 * a, "cos")
    return 2 * (head + c * (smooth - osc))


def x_minus_moment(order: int, a: float, split: float = 300.0) -> float:
    """<x-^order> for order 0 or 2, by quadrature plus the asymptotic tail.

    For |x| >> sqrt(a) the density behaves as
    3 a^{3/2} / (sqrt(pi) x^4) * (1 - sin(x^2 / (2a))); the tail beyond
    ``split * sqrt(a)`` uses that form, with neglected terms O(a/x^2) smaller.
    """
    if order not in (0, 2):
        raise ValueError("only the 0th and 2nd moments are finite")
    _check_a(a)
    X = split * math.sqrt(a)
    head = integrate(lambda x: x**order * x_minus_density(x, a), 0.0, X, rel_tol=1e-10)
    c = 3 * a**1.5 / math.sqrt(math.pi)
    smooth = X ** (order - 3) / (3 - order)
    osc = 0.5 * _fourier_tail((order - 5) / 2, X * X, 1 / (2 * a), "sin")
    return 2 * (head + c * (smooth - osc))


@lru_cache(maxsize=32)
def _x_minus_cdf_table(a: float, span: float = 60.0, n_nodes: int = 24001):
    x = np.linspace(0.0, span * math.sqrt(a), n_nodes)
    # 10-point Gauss-Legendre on every cell between nodes
    t, w = np.polynomial.legendre.leggauss(10)
    lo, hi = x[:-1], x[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    cell = half * (x_minus_density(mid[:, None] + half[:, None] * t, a) @ w)
    cdf = 0.5 + np.concatenate([[0.0], np.cumsum(cell)])
    return CubicHermiteSpline(x, cdf, x_minus_density(x, a)), x[-1]


def x_minus_cdf(x_minus, a: float):
    """Cumulative distribution of x- (tabulated quadrature, asymptotic far tail)."""
    _check_a(a)
    x = np.asarray(x_minus, dtype=float)
    spline, x_max = _x_minus_cdf_table(float(a))
    ax = np.abs(x)
    inner = spline(np.minimum(ax, x_max))
    # int_x^inf 3 a^1.5 / (sqrt(pi) t^4) dt
    tail = a**1.5 / (math.sqrt(math.pi) * np.maximum(ax, x_max) ** 3)
    upper = np.where(ax <= x_max, inner, 1.0 - tail)
    return np.where(x >= 0, upper, 1.0 - upper)


def x_minus_density_oracle(
    a: float,
    grid: Grid1D,
    k_edge_amplitude: float = 1e-6,
    guard: float = 400.0,
    max_fft: int = 1 << 24,
) -> Grid1D:
    """Position-difference density by discrete Fourier transform of the sinc amplitude.

    Independent of the Fresnel closed form.  ``grid`` is the output grid; the
    transform runs on a finer internal power-of-two grid whose momentum edge
    K satisfies 1/(a K^2) <= ``k_edge_amplitude`` and whose period exceeds the
    output span by ``guard * sqrt(a)`` so the slowly decaying wings do not
    alias back onto the output.
    """
    _check_a(a)
    k_edge = 1.0 / math.sqrt(a * k_edge_amplitude)
    dx_max = math.pi / k_edge
    sub = max(1, math.ceil(grid.step / dx_max - 1e-12))
    dx = grid.step / sub
    reach = max(abs(grid.min), abs(grid.max))
    period = 2 * reach + guard * math.sqrt(a)
    m = 1 << max(1, math.ceil(math.log2(period / dx)))
    if m > max_fft:
        raise BadGrid(
            f"output grid needs a {m}-point transform (limit {max_fft}); "
            "use a coarser or narrower grid"
        )
    # shift so that output points coincide with transform samples
    j0 = math.floor(grid.min / dx)
    delta = grid.min - j0 * dx
    dk = 2 * math.pi / (m * dx)
    k = (np.arange(m) - m // 2) * dk
    phi = k_minus_amplitude(k, a) * np.exp(1j * k * delta)
    psi = _dft(phi, inverse=True) * math.sqrt(m) * dk / math.sqrt(2 * math.pi)
    idx = j0 + m // 2 + sub * np.arange(grid.n_points)
    if idx[0] < 0 or idx[-1] >= m:
        raise BadGrid("output grid falls outside the transform window")
    return grid.with_values(np.abs(psi[idx]) ** 2)


def first_sideband_level(a: float) -> float:
    """Height of the first side lobe of rho(x-) relative to its peak."""
    _check_a(a)
    x = np.linspace(0.0, 12 * math.sqrt(a), 24001)
    r = x_minus_density(x, a)
    i = np.flatnonzero((r[1:-1] > r[:-2]) & (r[1:-1] >= r[2:]))[0] + 1
    res = minimize_scalar(
        lambda t: -x_minus_density(t, a), bounds=(x[i - 1], x[i + 1]), method="bounded",
        options={"xatol": 1e-12 * math.sqrt(a)},
    )
    return float(-res.fun / x_minus_density(0.0, a))


def pair_rate_scaling(config: SpdcConfig, reference: SpdcConfig) -> float:
    """Brightness ratio from R ~ d_eff^2 P_p L_z^2."""
    for cfg, label in ((config, "config"), (reference, "reference")):
        for name in ("d_eff", "P_p"):
            if getattr(cfg, name) is None:
                raise MissingField(f"{label} lacks {name}")
    return (config.d_eff**2 * config.P_p * config.L_z**2) / (
        reference.d_eff**2 * reference.P_p * reference.L_z**2
    )
