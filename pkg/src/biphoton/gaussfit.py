"""Double-Gaussian approximations of the crystal-plane biphoton.

A Double-Gaussian is fixed by two widths: ``sigma_plus`` of x+ = (x1+x2)/sqrt(2)
and ``sigma_minus`` of x- = (x1-x2)/sqrt(2).  ``sigma_plus`` always comes from
the pump (sqrt(2) sigma_p); three estimators choose ``sigma_minus``:

========================  ===============  =====================================
estimator                 sigma_minus      matches
========================  ===============  =====================================
``moment_match``          sqrt(a/3)        <k-^2> of the sinc^2 momentum density
``peak_match``            sqrt(8a/9)       rho(x- = 0) of the exact density
``exact_variance``        sqrt(9a/5)       <x-^2> of the exact density
========================  ===============  =====================================

Entropies default to bits (``log_base=2``); pass ``log_base=math.e`` for nats.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .model import SpdcConfig

ESTIMATORS = ("moment_match", "peak_match", "exact_variance")


@dataclass(frozen=True)
class DoubleGaussian:
    sigma_plus: float
    sigma_minus: float

    def __post_init__(self):
        if not (self.sigma_plus > 0 and self.sigma_minus > 0):
            raise ValueError(
                f"widths must be positive, got ({self.sigma_plus}, {self.sigma_minus})"
            )
        if self.sigma_plus < self.sigma_minus:
            warnings.warn(
                "sigma_plus < sigma_minus: anti-correlated state, unusual for SPDC",
                stacklevel=3,
            )

    @property
    def n(self) -> float:
        """Birth-zone number sigma_plus / sigma_minus."""
        return self.sigma_plus / self.sigma_minus

    @property
    def sigma_k_plus(self) -> float:
        return 1.0 / (2 * self.sigma_plus)

    @property
    def sigma_k_minus(self) -> float:
        return 1.0 / (2 * self.sigma_minus)

    def momentum_dual(self) -> "DoubleGaussian":
        """Widths of the momentum-space Double-Gaussian (k+ and k-).

        Note the roles swap: the broad axis in position is the narrow one in
        momentum.
        """
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return DoubleGaussian(self.sigma_k_plus, self.sigma_k_minus)


@dataclass(frozen=True)
class GaussianStats:
    marginal_variance: float
    conditional_variance: float
    covariance: float
    pearson_r: float
    joint_entropy: float
    marginal_entropy: float
    mutual_information: float
    log_base: float = 2.0

    @property
    def fedorov_ratio(self) -> float:
        """sigma_x1 / sigma_(x1|x2)."""
        return math.sqrt(self.marginal_variance / self.conditional_variance)


@dataclass(frozen=True)
class HeisenbergProducts:
    plus: float
    minus: float
    marginal_x_conditional_k: float
    marginal_k_conditional_x: float


def _sigma_plus(config: SpdcConfig) -> float:
    return math.sqrt(2) * config.sigma_p


def fit_moment_match(config: SpdcConfig) -> DoubleGaussian:
    return DoubleGaussian(_sigma_plus(config), math.sqrt(config.a / 3))


def fit_peak_match(config: SpdcConfig) -> DoubleGaussian:
    return DoubleGaussian(_sigma_plus(config), math.sqrt(8 * config.a / 9))


def fit_exact_variance(config: SpdcConfig) -> DoubleGaussian:
    return DoubleGaussian(_sigma_plus(config), math.sqrt(9 * config.a / 5))


_FITS = {
    "moment_match": fit_moment_match,
    "peak_match": fit_peak_match,
    "exact_variance": fit_exact_variance,
}


def fit(config: SpdcConfig, estimator: str) -> DoubleGaussian:
    try:
        return _FITS[estimator](config)
    except KeyError:
        raise ValueError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}") from None


def correlation_width(dg: DoubleGaussian) -> float:
    """Standard deviation of x1 - x2."""
    return math.sqrt(2) * dg.sigma_minus


def pearson_r(sigma_plus: float, sigma_minus: float) -> float:
    sp2, sm2 = sigma_plus**2, sigma_minus**2
    return (sp2 - sm2) / (sp2 + sm2)


def stats(dg: DoubleGaussian, log_base: float = 2.0) -> GaussianStats:
    sp2, sm2 = dg.sigma_plus**2, dg.sigma_minus**2
    ln = math.log
    scale = ln(log_base)
    return GaussianStats(
        marginal_variance=(sp2 + sm2) / 2,
        conditional_variance=2 * sp2 * sm2 / (sp2 + sm2),
        covariance=(sp2 - sm2) / 2,
        pearson_r=pearson_r(dg.sigma_plus, dg.sigma_minus),
        joint_entropy=ln(2 * math.pi * math.e * dg.sigma_plus * dg.sigma_minus) / scale,
        marginal_entropy=0.5 * ln(math.pi * math.e * (sp2 + sm2)) / scale,
        mutual_information=ln((sp2 + sm2) / (2 * dg.sigma_plus * dg.sigma_minus)) / scale,
        log_base=log_base,
    )


def conditional_mean(dg: DoubleGaussian, x_given: float) -> float:
    """Mean of x2 given x1 = ``x_given`` (equivalently x1 given x2)."""
    return pearson_r(dg.sigma_plus, dg.sigma_minus) * x_given


def heisenberg_products(dg: DoubleGaussian) -> HeisenbergProducts:
    """Rotated and conditional position-momentum uncertainty products.

    Every product equals 1/2 for a Double-Gaussian.
    """
    x = stats(dg)
    k = stats(dg.momentum_dual())
    return HeisenbergProducts(
        plus=dg.sigma_plus * dg.sigma_k_plus,
        minus=dg.sigma_minus * dg.sigma_k_minus,
        marginal_x_conditional_k=math.sqrt(x.marginal_variance * k.conditional_variance),
        marginal_k_conditional_x=math.sqrt(k.marginal_variance * x.conditional_variance),
    )
