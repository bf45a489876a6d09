"""Entanglement and spatial coherence of the Double-Gaussian biphoton.

Everything here is a function of the birth-zone number N = sigma_plus / sigma_minus
(the pump width over the birth-zone width).  The Schmidt spectrum is
geometric, so the Schmidt number, mutual information and symmetric coherence
widths all have closed forms; quadrature versions of g1 and g2 are provided
as independent checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateState, DomainError
from .gaussfit import DoubleGaussian
from .model import SpdcConfig
from .numerics import integrate


@dataclass(frozen=True)
class BirthZoneGeometry:
    delta_p: float  # pump width 2 sigma_p = sqrt(2) sigma_plus (m)
    delta_bz: float  # birth-zone width sqrt(2) sigma_minus (m)
    n: float


@dataclass(frozen=True)
class SchmidtSpectrum:
    eigenvalues: np.ndarray
    birth_zone_number: float
    schmidt_number: float
    truncation_mass: float


def birth_zone_number(dg: DoubleGaussian) -> BirthZoneGeometry:
    return BirthZoneGeometry(
        delta_p=math.sqrt(2) * dg.sigma_plus,
        delta_bz=math.sqrt(2) * dg.sigma_minus,
        n=dg.sigma_plus / dg.sigma_minus,
    )


def birth_zone_number_from_fwhm(fwhm_p: float, config: SpdcConfig) -> float:
    """N from the measured pump FWHM, using the peak-matched birth zone."""
    if not fwhm_p > 0:
        raise DomainError(f"pump FWHM must be positive, got {fwhm_p}")
    scale = math.sqrt(8 * math.log(2) / (9 * math.pi) * config.L_z * config.lambda_p)
    return fwhm_p / scale


def default_truncation(n: float) -> int:
    """Number of modes keeping the discarded mass below about e^-60."""
    if n == 1:
        return 1
    return math.ceil(60 / math.log((n + 1) ** 2 / (n - 1) ** 2))


def schmidt_number(n: float) -> float:
    return (n + 1 / n) / 2


def schmidt_eigenvalues(n: float, n_max: int | None = None) -> SchmidtSpectrum:
    """Geometric Schmidt spectrum lambda_k = 4N/(N+1)^2 q^k, q = ((N-1)/(N+1))^2.

    ``n_max`` is the number of retained modes.  The discarded mass q**n_max
    is reported, not redistributed.
    """
    if not (math.isfinite(n) and n >= 1):
        raise DomainError(f"birth-zone number must be >= 1, got {n}")
    if n_max is None:
        n_max = default_truncation(n)
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    q = ((n - 1) / (n + 1)) ** 2
    lam0 = 4 * n / (n + 1) ** 2
    eig = lam0 * q ** np.arange(n_max, dtype=float)
    return SchmidtSpectrum(
        eigenvalues=eig,
        birth_zone_number=n,
        schmidt_number=schmidt_number(n),
        truncation_mass=q**n_max,
    )


def participation_ratio(spectrum: SchmidtSpectrum) -> float:
    """1 / sum(lambda^2) from the retained eigenvalues."""
    return 1.0 / math.fsum(spectrum.eigenvalues**2)


def mutual_information_bits(dg: DoubleGaussian) -> float:
    return math.log2(schmidt_number(dg.n))


def g1_symmetric(dg: DoubleGaussian, x):
    geo = birth_zone_number(dg)
    n2 = geo.n**2
    x = np.asarray(x, dtype=float)
    return np.exp(-(x**2) / (2 * geo.delta_p**2) * (n2 - 1) ** 2 / (n2 + 1))


def g2_symmetric(dg: DoubleGaussian, x):
    geo = birth_zone_number(dg)
    n, n2 = geo.n, geo.n**2
    x = np.asarray(x, dtype=float)
    width = geo.delta_p / (2 * n)
    return (n2 + 1) / (2 * n) * np.exp(-(x**2) / (2 * width**2) * (n2 - 1) / (n2 + 1))


def _require_entangled(dg: DoubleGaussian) -> BirthZoneGeometry:
    geo = birth_zone_number(dg)
    if geo.n <= 1:
        raise DegenerateState(f"coherence widths need N > 1, got N = {geo.n}")
    return geo


def g1_width(dg: DoubleGaussian) -> float:
    """|x| at which g1 falls to exp(-1/2)."""
    geo = _require_entangled(dg)
    n2 = geo.n**2
    return geo.delta_p * math.sqrt((n2 + 1) / (n2 - 1) ** 2)


def g2_width(dg: DoubleGaussian) -> float:
    """|x| at which g2 falls back to unity."""
    geo = _require_entangled(dg)
    n, n2 = geo.n, geo.n**2
    return geo.delta_p / n * math.sqrt(0.5 * (n2 + 1) / (n2 - 1) * math.log((n2 + 1) / (2 * n)))


def g1_width_large_n(dg: DoubleGaussian) -> float:
    geo = birth_zone_number(dg)
    return geo.delta_p / geo.n


def g2_width_large_n(dg: DoubleGaussian) -> float:
    geo = birth_zone_number(dg)
    return geo.delta_p / geo.n * math.sqrt(0.5 * math.log(geo.n / 2))


def _relative_error(kind: str, n: float) -> float:
    dg = DoubleGaussian(float(n), 1.0)
    if kind == "g1":
        exact, approx = g1_width(dg), g1_width_large_n(dg)
    elif kind == "g2":
        exact, approx = g2_width(dg), g2_width_large_n(dg)
    else:
        raise ValueError(f"kind must be 'g1' or 'g2', got {kind!r}")
    return abs(approx - exact) / exact


def large_n_error(kind: str, n: float) -> float:
    """Relative error |approx - exact| / exact of the large-N width formula."""
    return _relative_error(kind, n)


def large_n_threshold(kind: str, tolerance: float = 0.01, bracket=(3.0, 1000.0)) -> float:
    """Smallest N beyond which the large-N width is within ``tolerance``.

    The error decreases monotonically on the default bracket, so this is
    the single root of error(N) - tolerance.
    """
    lo, hi = bracket
    return brentq(lambda n: _relative_error(kind, n) - tolerance, lo, hi, xtol=1e-12)


def _wavefunction(dg: DoubleGaussian):
    sp, sm = dg.sigma_plus, dg.sigma_minus
    norm = 1 / math.sqrt(2 * math.pi * sp * sm)

    def psi(x1, x2):
        return norm * np.exp(-((x1 - x2) ** 2) / (8 * sm**2) - (x1 + x2) ** 2 / (8 * sp**2))

    return psi


def _marginal(psi, x: float, rel_tol: float) -> float:
    return integrate(lambda t: psi(x, t) ** 2, -math.inf, math.inf, rel_tol=rel_tol)


def _unit_scale(dg: DoubleGaussian, x: float):
    # g1 and g2 are dimensionless; work in units of sigma_plus so the
    # infinite-range quadrature sees an O(1) integrand
    s = dg.sigma_plus
    return DoubleGaussian(1.0, dg.sigma_minus / s), x / s


def g1_quadrature(dg: DoubleGaussian, x: float, rel_tol: float = 1e-12) -> float:
    """Normalised overlap of psi(x, .) and psi(-x, .) by direct integration."""
    dg, x = _unit_scale(dg, x)
    psi = _wavefunction(dg)
    overlap = integrate(lambda t: psi(x, t) * psi(-x, t), -math.inf, math.inf, rel_tol=rel_tol)
    return overlap / math.sqrt(_marginal(psi, x, rel_tol) * _marginal(psi, -x, rel_tol))


def g2_quadrature(dg: DoubleGaussian, x: float, rel_tol: float = 1e-12) -> float:
    """|psi(x, -x)|^2 over the product of the two single-photon marginals."""
    dg, x = _unit_scale(dg, x)
    psi = _wavefunction(dg)
    joint = psi(x, -x) ** 2
    return float(joint / (_marginal(psi, x, rel_tol) * _marginal(psi, -x, rel_tol)))


def crossing_width(func, level: float, start: float) -> float:
    """First x > 0 where the decreasing function ``func`` reaches ``level``.

    The bracket grows geometrically from ``start``.
    """
    hi = start
    for _ in range(200):
        if func(hi) < level:
            break
        hi *= 2
    else:
        raise DegenerateState("function never drops to the requested level")
    return brentq(lambda x: func(x) - level, 0.0, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps)
