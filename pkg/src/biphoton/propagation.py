"""Paraxial free-space propagation of the Double-Gaussian joint state.

Only intensity-level quantities are produced (densities, widths, Pearson r);
the relative phase that the joint amplitude picks up at intermediate planes is
not tracked.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BadGrid, ValidationError
from .gaussfit import DoubleGaussian
from .numerics import Grid1D, _dft


@dataclass(frozen=True)
class BivariateGaussian:
    """Density sqrt(ac - b^2)/pi * exp(-(a x1^2 + 2 b x1 x2 + c x2^2))."""

    coeff_a: float
    coeff_b: float
    coeff_c: float

    def __post_init__(self):
        if not (self.coeff_a > 0 and self.coeff_c > 0 and self.determinant > 0):
            raise ValidationError("quadratic form is not positive definite")

    @property
    def determinant(self) -> float:
        return self.coeff_a * self.coeff_c - self.coeff_b**2

    def density(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        q = self.coeff_a * x1**2 + 2 * self.coeff_b * x1 * x2 + self.coeff_c * x2**2
        return math.sqrt(self.determinant) / math.pi * np.exp(-q)

    @property
    def variances(self) -> tuple[float, float]:
        # covariance matrix is inv([[a, b], [b, c]]) / 2
        det2 = 2 * self.determinant
        return self.coeff_c / det2, self.coeff_a / det2

    @property
    def pearson_r(self) -> float:
        return -self.coeff_b / math.sqrt(self.coeff_a * self.coeff_c)


@dataclass(frozen=True)
class PropagationPlanes:
    """Signal plane ``z1`` and idler plane ``z2`` (m, negative allowed); pump wavenumber."""

    z1: float
    z2: float
    k_p: float

    def __post_init__(self):
        if not self.k_p > 0:
            raise ValidationError(f"k_p must be positive, got {self.k_p}")
        if not (math.isfinite(self.z1) and math.isfinite(self.z2)):
            raise ValidationError("plane positions must be finite")

    def normalized(self, dg: DoubleGaussian) -> tuple[float, float]:
        """Distances in units of k_p sigma_plus sigma_minus."""
        scale = self.k_p * dg.sigma_plus * dg.sigma_minus
        return self.z1 / scale, self.z2 / scale


def transfer_phase(z, kx, k_p: float):
    """Per-photon paraxial phase exp(-i z kx^2 / k_p), global phase dropped."""
    return np.exp(-1j * np.asarray(z) * np.asarray(kx) ** 2 / k_p)


def _spread(sigma: float, z: float, k_p: float) -> float:
    return math.sqrt(sigma**2 + (z / (sigma * k_p)) ** 2)


def propagate_equal(dg: DoubleGaussian, z: float, k_p: float) -> DoubleGaussian:
    """Both photons to the same plane z: the state stays a Double-Gaussian."""
    if not k_p > 0:
        raise ValidationError(f"k_p must be positive, got {k_p}")
    # far from the crystal the widths can cross over (anti-correlation), which is expected here
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return DoubleGaussian(_spread(dg.sigma_plus, z, k_p), _spread(dg.sigma_minus, z, k_p))


def propagate_general(dg: DoubleGaussian, planes: PropagationPlanes) -> BivariateGaussian:
    """Quadratic-form coefficients of the joint density at planes (z1, z2)."""
    sp2, sm2 = dg.sigma_plus**2, dg.sigma_minus**2
    z1, z2, k = planes.z1, planes.z2, planes.k_p
    s, d = sp2 + sm2, sp2 - sm2
    p = k**2 * sp2 * sm2
    denom = (
        k**2 * (z1**2 + z2**2) * s**2
        + 2 * k**2 * z1 * z2 * d**2
        + 4 * z1**2 * z2**2
        + 4 * p**2
    )
    return BivariateGaussian(
        coeff_a=k**2 * s * (z2**2 + p) / denom,
        coeff_b=k**2 * d * (z1 * z2 - p) / denom,
        coeff_c=k**2 * s * (z1**2 + p) / denom,
    )


def pearson_propagated(dg: DoubleGaussian, planes: PropagationPlanes) -> float:
    """r(z1, z2) = r0 (1 - zb1 zb2) / sqrt((zb1^2 + 1)(zb2^2 + 1))."""
    sp2, sm2 = dg.sigma_plus**2, dg.sigma_minus**2
    r0 = (sp2 - sm2) / (sp2 + sm2)
    zb1, zb2 = planes.normalized(dg)
    return r0 * (1 - zb1 * zb2) / math.sqrt((zb1**2 + 1) * (zb2**2 + 1))


@dataclass(frozen=True)
class JointDensity:
    """Sampled joint density on a square grid; ``density[i, j]`` is at (x[i], x[j])."""

    x: np.ndarray
    density: np.ndarray

    @property
    def step(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def mass(self) -> float:
        return float(self.density.sum() * self.step**2)

    def moments(self) -> dict[str, float]:
        w = self.density / self.density.sum()
        x1 = self.x[:, None]
        x2 = self.x[None, :]
        m1, m2 = float((w * x1).sum()), float((w * x2).sum())
        v1 = float((w * (x1 - m1) ** 2).sum())
        v2 = float((w * (x2 - m2) ** 2).sum())
        cov = float((w * (x1 - m1) * (x2 - m2)).sum())
        xp, xm = (x1 + x2) / math.sqrt(2), (x1 - x2) / math.sqrt(2)
        return {
            "mean_x1": m1,
            "mean_x2": m2,
            "var_x1": v1,
            "var_x2": v2,
            "cov": cov,
            "pearson_r": cov / math.sqrt(v1 * v2),
            "var_plus": float((w * xp**2).sum()),
            "var_minus": float((w * xm**2).sum()),
            "cov_plus_minus": float((w * xp * xm).sum()),
        }


def fft_propagate_oracle(
    dg: DoubleGaussian, planes: PropagationPlanes, grid: Grid1D
) -> JointDensity:
    """Propagate by sampling the momentum amplitude, applying phases and transforming back.

    ``grid`` is the (centred, power-of-two) position axis shared by both
    photons.  It must span at least eight propagated widths, have at least
    1024 points, and keep the quadratic phase increment below pi per momentum
    sample out to four marginal momentum widths (the same reach as the
    eight-width span rule, or the grid edge if nearer); otherwise :class:`BadGrid` is raised.
    """
    n = grid.n_points
    if n < 1024:
        raise BadGrid(f"need at least 1024 points per axis, got {n}")
    z_far = max(abs(planes.z1), abs(planes.z2))
    far = propagate_equal(dg, z_far, planes.k_p)
    span = grid.max - grid.min
    if span < 8 * max(far.sigma_plus, far.sigma_minus):
        raise BadGrid(
            f"grid span {span:.3g} m is under 8 propagated widths "
            f"({8 * max(far.sigma_plus, far.sigma_minus):.3g} m)"
        )
    kgrid = grid.conjugate()
    k = kgrid.points
    dk = kgrid.step
    # phase sampling only matters where the amplitude is not negligible
    sigma_k1 = math.sqrt((dg.sigma_k_plus**2 + dg.sigma_k_minus**2) / 2)
    k_edge = min(max(abs(kgrid.min), abs(kgrid.max)), 4 * sigma_k1)
    if 2 * z_far * k_edge * dk / planes.k_p > math.pi:
        raise BadGrid("quadratic propagation phase is undersampled at the grid edge")

    k1 = k[:, None]
    k2 = k[None, :]
    sp2, sm2 = dg.sigma_plus**2, dg.sigma_minus**2
    # amplitude exp(-sigma+^2 k+^2 - sigma-^2 k-^2) with k+- = (k1 +- k2)/sqrt(2)
    norm = math.sqrt(2 * dg.sigma_plus * dg.sigma_minus / math.pi)
    amp = norm * np.exp(-0.5 * (sp2 * (k1 + k2) ** 2 + sm2 * (k1 - k2) ** 2))
    amp = amp * transfer_phase(planes.z1, k1, planes.k_p) * transfer_phase(planes.z2, k2, planes.k_p)
    psi = _dft(_dft(amp, inverse=True, axis=0), inverse=True, axis=1)
    # unitary transform: sum |psi_x|^2 dx^2 = sum |psi_k|^2 dk^2, no renormalisation
    rho = np.abs(psi) ** 2 * (dk / grid.step) ** 2
    return JointDensity(grid.points, rho)
