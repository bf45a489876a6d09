"""Temporal correlation widths of down-converted pairs.

Type-II walk-off gives a top-hat distribution of t1 - t2 with full width
``W = L |n_g1 - n_g2| / c``.  In Type-I the group indices match and the width
comes from group-velocity dispersion; the time-difference density has the
same sinc-squared structure as the transverse problem, so the same peak-match
and exact-variance estimators apply with a_time = L |kappa1| / 4.

Any spectral filter caps the measurable sharpness: sigma_omega sigma_t >= 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from scipy.constants import c as SPEED_OF_LIGHT

from .errors import ConfigError, DomainError, ValidationError

# 1 fs^2/mm = 1e-30 s^2 / 1e-3 m
FS2_PER_MM = 1e-27

TYPE1_ESTIMATORS = ("exact_variance", "peak_match")


@dataclass(frozen=True)
class MaterialDispersion:
    n_g_signal: float
    n_g_idler: float
    kappa1: float  # s^2/m

    def __post_init__(self):
        if not (self.n_g_signal >= 1 and self.n_g_idler >= 1):
            raise ValidationError("group indices must be >= 1")
        if not math.isfinite(self.kappa1):
            raise ValidationError("kappa1 must be finite")


@dataclass(frozen=True)
class SpectralFilter:
    center_wavelength: float  # m
    bandwidth_fwhm: float  # m, full width in wavelength

    def __post_init__(self):
        if not self.center_wavelength > 0:
            raise ValidationError("filter center wavelength must be positive")
        if not 0 < self.bandwidth_fwhm < self.center_wavelength:
            raise ValidationError("filter bandwidth must lie in (0, center wavelength)")


def _check_length(L_z: float) -> None:
    if not L_z > 0:
        raise ValidationError(f"crystal length must be positive, got {L_z}")


def type2_width(L_z: float, disp: MaterialDispersion) -> float:
    """Full width (s) of the top-hat t1 - t2 distribution from group walk-off."""
    _check_length(L_z)
    return L_z * abs(disp.n_g_signal - disp.n_g_idler) / SPEED_OF_LIGHT


def time_parameter(L_z: float, disp: MaterialDispersion) -> float:
    """a_time = L |kappa1| / 4 (s^2), the temporal counterpart of the transverse a."""
    _check_length(L_z)
    if disp.kappa1 == 0:
        raise DomainError("Type-I width needs nonzero group-velocity dispersion")
    return L_z * abs(disp.kappa1) / 4


def type1_sigma(L_z: float, disp: MaterialDispersion, estimator: str = "peak_match") -> float:
    """Standard deviation (s) of t1 - t2 for Type-I down-conversion."""
    a_time = time_parameter(L_z, disp)
    # sqrt(2) converts the rotated-coordinate width into the t1 - t2 width
    if estimator == "exact_variance":
        return math.sqrt(2) * math.sqrt(9 * a_time / 5)
    if estimator == "peak_match":
        return math.sqrt(2) * math.sqrt(8 * a_time / 9)
    raise ValidationError(f"unknown estimator {estimator!r}; choose from {TYPE1_ESTIMATORS}")


def filter_sigma_omega(filt: SpectralFilter) -> float:
    """Half of the filter's full angular-frequency width, 2 pi c dlambda / lambda^2 / 2."""
    full = 2 * math.pi * SPEED_OF_LIGHT * filt.bandwidth_fwhm / filt.center_wavelength**2
    return full / 2


def time_correlation_floor(sigma_omega: float) -> float:
    """Smallest resolvable t1 - t2 width, 1 / (2 sigma_omega)."""
    if not sigma_omega > 0:
        raise ValidationError(f"sigma_omega must be positive, got {sigma_omega}")
    return 1 / (2 * sigma_omega)


def sum_difference_ratio(pump_coherence_time: float, sigma_difference: float) -> float:
    """sigma(t1 + t2) / sigma(t1 - t2) for a user-supplied pump coherence time.

    No default pump linewidth is assumed; the sum width is taken to be the
    pump coherence time.
    """
    if not (pump_coherence_time > 0 and sigma_difference > 0):
        raise ValidationError("both times must be positive")
    return pump_coherence_time / sigma_difference


@dataclass(frozen=True)
class MaterialRecord:
    crystal: str
    center_wavelength: float  # m
    dispersion: MaterialDispersion


def _parse_materials(text: str, source: str) -> dict[tuple[str, float], MaterialRecord]:
    table = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 5:
            raise ConfigError(f"{source}:{lineno}: expected 5 fields, got {len(fields)}")
        name = fields[0]
        try:
            wl_nm, ng1, ng2, k_fs2mm = map(float, fields[1:])
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
        rec = MaterialRecord(name, wl_nm * 1e-9, MaterialDispersion(ng1, ng2, k_fs2mm * FS2_PER_MM))
        table[(name, wl_nm)] = rec
    return table


def load_materials(path: str | Path | None = None) -> dict[tuple[str, float], MaterialRecord]:
    """Read a material table keyed by (crystal, center wavelength in nm).

    Without ``path`` the bundled fixture table is used.
    """
    if path is None:
        text = resources.files("biphoton").joinpath("data/materials.dat").read_text()
        return _parse_materials(text, "materials.dat")
    path = Path(path)
    return _parse_materials(path.read_text(), str(path))


def lookup_material(name: str, wavelength_nm: float | None = None, path=None) -> MaterialRecord:
    table = load_materials(path)
    hits = [r for (n, wl), r in table.items() if n == name and (wavelength_nm is None or wl == wavelength_nm)]
    if len(hits) != 1:
        raise ConfigError(
            f"material {name!r} at {wavelength_nm} nm matched {len(hits)} records"
        )
    return hits[0]
