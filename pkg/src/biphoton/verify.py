"""Self-check suite: closed forms against independent numerical oracles."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import coherence, model, propagation
from .gaussfit import DoubleGaussian
from .numerics import Grid1D, full_width_at_fraction, integrate
from .temporal import MaterialDispersion, type1_sigma


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0


def check_fourier_consistency(a: float = 2.0, n_points: int = 4096, tol: float = 1e-4) -> CheckResult:
    """FFT of the sinc amplitude vs the Fresnel closed form on the central +-5 sqrt(a)."""
    half = 10 * math.sqrt(a)
    grid = Grid1D.centered(n_points, 2 * half / n_points)
    numeric = model.x_minus_density_oracle(a, grid)
    x = grid.points
    core = np.abs(x) <= 5 * math.sqrt(a)
    dev = float(np.max(np.abs(numeric.values[core] - model.x_minus_density(x[core], a))))
    return CheckResult("fourier_consistency", dev <= tol, dev, tol, f"a = {a}, {n_points} points")


def check_moments(a_values=(0.5, 2.0, 10.0), tol: float = 1e-6) -> CheckResult:
    worst = 0.0
    for a in a_values:
        pairs = (
            (model.k_minus_moment(0, a), 1.0),
            (model.k_minus_moment(2, a), 3 / (4 * a)),
            (model.x_minus_moment(0, a), 1.0),
            (model.x_minus_moment(2, a), 9 * a / 5),
        )
        worst = max(worst, *(abs(got / want - 1) for got, want in pairs))
    return CheckResult("quadrature_moments", worst <= tol, worst, tol, "norms and second moments, relative")


def check_fft_propagation(zbars=(0.0, 0.5, 1.0, 2.0), r_tol: float = 1e-3, w_tol: float = 5e-3) -> CheckResult:
    dg = DoubleGaussian(1.0, 0.2)
    k_p = 1.0
    worst_r = worst_w = 0.0
    for zb in zbars:
        z = zb * k_p * dg.sigma_plus * dg.sigma_minus
        planes = propagation.PropagationPlanes(z, z, k_p)
        far = propagation.propagate_equal(dg, z, k_p)
        span = 16 * max(far.sigma_plus, far.sigma_minus)
        joint = propagation.fft_propagate_oracle(dg, planes, Grid1D.centered(1024, span / 1024))
        m = joint.moments()
        worst_r = max(worst_r, abs(m["pearson_r"] - propagation.pearson_propagated(dg, planes)))
        worst_w = max(
            worst_w,
            abs(math.sqrt(m["var_plus"]) / far.sigma_plus - 1),
            abs(math.sqrt(m["var_minus"]) / far.sigma_minus - 1),
        )
    ok = worst_r <= r_tol and worst_w <= w_tol
    return CheckResult(
        "fft_propagation", ok, max(worst_r, worst_w), min(r_tol, w_tol),
        f"max |dr| = {worst_r:.2e}, max width error = {worst_w:.2e}",
    )


def check_schmidt_sums(ns=(1.5, 5.0, 13.333, 100.0), tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for n in ns:
        spectrum = coherence.schmidt_eigenvalues(n)
        worst = max(
            worst,
            abs(math.fsum(spectrum.eigenvalues) - 1),
            abs(coherence.participation_ratio(spectrum) / spectrum.schmidt_number - 1),
            spectrum.truncation_mass,
        )
    return CheckResult("schmidt_sums", worst <= tol, worst, tol, "sum, 1/sum(l^2) vs K, truncation mass")


def check_coherence_quadrature(ns=(2.0, 10.0, 100.0), tol: float = 1e-8) -> CheckResult:
    worst = 0.0
    for n in ns:
        dg = DoubleGaussian(n, 1.0)
        geo = coherence.birth_zone_number(dg)
        for x in (0.0, geo.delta_bz, geo.delta_p):
            worst = max(
                worst,
                abs(coherence.g1_symmetric(dg, x) - coherence.g1_quadrature(dg, x)),
                abs(coherence.g2_symmetric(dg, x) - coherence.g2_quadrature(dg, x)),
            )
    return CheckResult("coherence_quadrature", worst <= tol, worst, tol, "g1 and g2 closed form vs quadrature")


def fwhm_deviation(a: float = 2.0) -> float:
    """Relative amount by which the peak-matched Gaussian FWHM undercuts the exact FWHM."""
    sigma = math.sqrt(8 * a / 9)
    exact = full_width_at_fraction(lambda x: model.x_minus_density(x, a), 0.5, (-20 * math.sqrt(a), 20 * math.sqrt(a)))
    gauss = 2 * math.sqrt(2 * math.log(2)) * sigma
    return 1 - gauss / exact


def check_fwhm_claim(tol: float = 3.5e-3) -> CheckResult:
    dev = fwhm_deviation()
    return CheckResult("fwhm_claim", 0 <= dev <= tol, dev, tol, f"peak-match FWHM is {100 * dev:.2f}% narrower")


def central_mass(a: float = 2.0) -> float:
    s = math.sqrt(8 * a / 9)
    return integrate(lambda x: model.x_minus_density(x, a), -s, s, rel_tol=1e-12)


def check_cdf_claim(tol: float = 2e-3) -> CheckResult:
    dev = abs(central_mass() - 0.690)
    return CheckResult("cdf_claim", dev <= tol, dev, tol, f"mass within one peak-matched sigma = {central_mass():.5f}")


def check_estimator_ratio(tol: float = 1e-10) -> CheckResult:
    want = math.sqrt(81 / 40)
    a = 2.0
    transverse = math.sqrt(9 * a / 5) / math.sqrt(8 * a / 9)
    disp = MaterialDispersion(1.8, 1.8, 3e-27)
    temporal = type1_sigma(3e-3, disp, "exact_variance") / type1_sigma(3e-3, disp, "peak_match")
    dev = max(abs(transverse - want), abs(temporal - want))
    return CheckResult("estimator_ratio", dev <= tol, dev, tol, "transverse and temporal")


def check_large_n_thresholds(tol: float = 0.2) -> CheckResult:
    t1 = coherence.large_n_threshold("g1")
    t2 = coherence.large_n_threshold("g2")
    dev = max(abs(t1 - 12.3), abs(t2 - 11.4))
    return CheckResult("large_n_thresholds", dev <= tol, dev, tol, f"g1 N = {t1:.4f}, g2 N = {t2:.4f}")


CHECKS = (
    check_fourier_consistency,
    check_moments,
    check_fft_propagation,
    check_schmidt_sums,
    check_coherence_quadrature,
    check_fwhm_claim,
    check_cdf_claim,
    check_estimator_ratio,
    check_large_n_thresholds,
)


def run_all() -> list[CheckResult]:
    """Run every check; exceptions count as failures rather than propagating."""
    results = []
    for check in CHECKS:
        name = check.__name__.removeprefix("check_")
        t0 = time.perf_counter()
        try:
            res = check()
        except Exception as exc:  # a crashing oracle is a failed check
            res = CheckResult(name, False, math.nan, math.nan, f"{type(exc).__name__}: {exc}")
        results.append(
            CheckResult(res.name, bool(res.passed), float(res.deviation), res.tolerance, res.detail, time.perf_counter() - t0)
        )
    return results
