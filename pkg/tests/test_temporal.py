import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import c

from biphoton.errors import ConfigError, DomainError, ValidationError
from biphoton.temporal import (
    FS2_PER_MM,
    MaterialDispersion,
    SpectralFilter,
    filter_sigma_omega,
    load_materials,
    lookup_material,
    sum_difference_ratio,
    time_correlation_floor,
    type1_sigma,
    type2_width,
)

FS = 1e-15


def test_material_validation():
    with pytest.raises(ValidationError):
        MaterialDispersion(0.9, 1.5, 1e-27)
    with pytest.raises(ValidationError):
        MaterialDispersion(1.5, 1.5, math.inf)
    MaterialDispersion(1.5, 1.6, -2e-27)  # sign of kappa1 is free


def test_filter_validation():
    with pytest.raises(ValidationError):
        SpectralFilter(0.0, 1e-9)
    with pytest.raises(ValidationError):
        SpectralFilter(1e-6, 2e-6)


def test_type2_width():
    assert type2_width(1e-3, MaterialDispersion(1.6, 1.6, 0.0)) == 0.0
    d = MaterialDispersion(1.8, 1.725, 0.0)
    w = type2_width(0.5e-3, d)
    assert w == pytest.approx(0.5e-3 * 0.075 / c, rel=1e-12)
    assert w / FS == pytest.approx(125, abs=0.5)
    assert type2_width(1e-3, d) == pytest.approx(2 * w)


def test_type1_sigma():
    d = MaterialDispersion(1.8, 1.8, 3.0e-27)
    pm = type1_sigma(3e-3, d, "peak_match")
    assert pm == pytest.approx(math.sqrt(4 * 3e-3 * 3.0e-27 / 9), rel=1e-14)
    assert pm / FS == pytest.approx(2.0, abs=1e-9)
    ev = type1_sigma(3e-3, d, "exact_variance")
    assert ev == pytest.approx(math.sqrt(9 * 3e-3 * 3.0e-27 / 10), rel=1e-14)
    with pytest.raises(DomainError):
        type1_sigma(3e-3, MaterialDispersion(1.8, 1.8, 0.0))
    with pytest.raises(ValidationError):
        type1_sigma(3e-3, d, "moment_match")
    with pytest.raises(ValidationError):
        type1_sigma(0.0, d)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-5, 1e-1), st.floats(-1e-24, 1e-24).filter(lambda k: abs(k) > 1e-32))
def test_type1_ratio_and_scaling(L, kappa):
    d = MaterialDispersion(1.5, 1.5, kappa)
    ratio = type1_sigma(L, d, "exact_variance") / type1_sigma(L, d, "peak_match")
    assert ratio == pytest.approx(math.sqrt(81 / 40), rel=1e-12)
    assert type1_sigma(4 * L, d) == pytest.approx(2 * type1_sigma(L, d), rel=1e-12)


def test_filter_sigma_omega():
    s = filter_sigma_omega(SpectralFilter(1550e-9, 2e-9))
    assert s == pytest.approx(2 * math.pi * c * 2e-9 / 1550e-9**2 / 2, rel=1e-14)
    assert s == pytest.approx(7.85e11, rel=0.01)
    assert filter_sigma_omega(SpectralFilter(1550e-9, 1e-9)) == pytest.approx(s / 2)
    assert filter_sigma_omega(SpectralFilter(775e-9, 1e-9)) == pytest.approx(1.57e12, rel=0.01)


def test_time_floor():
    assert time_correlation_floor(7.8e11) / FS == pytest.approx(641, abs=1)
    assert time_correlation_floor(2e14) / FS == pytest.approx(2.5)
    assert time_correlation_floor(2e12) == pytest.approx(time_correlation_floor(1e12) / 2)
    with pytest.raises(ValidationError):
        time_correlation_floor(0.0)


def test_filtering_penalty_and_type_contrast():
    mats = load_materials()
    t2 = mats[("fixture-type2", 1550.0)].dispersion
    t1 = mats[("fixture-type1", 1550.0)].dispersion
    floor = time_correlation_floor(filter_sigma_omega(SpectralFilter(1550e-9, 2e-9)))
    width = type1_sigma(3e-3, t1, "peak_match")
    assert floor / width > 100
    assert 30 < type2_width(0.5e-3, t2) / width < 100


def test_materials_file_units(tmp_path):
    table = load_materials()
    rec = table[("fixture-type1", 1550.0)]
    assert rec.dispersion.kappa1 == pytest.approx(3.0 * FS2_PER_MM)
    assert FS2_PER_MM == pytest.approx(1e-30 / 1e-3)
    assert rec.center_wavelength == pytest.approx(1.55e-6)
    custom = tmp_path / "m.dat"
    custom.write_text("# c\nktp 810 1.84 1.76 200\n")
    rec = lookup_material("ktp", 810, custom)
    assert rec.dispersion.kappa1 == pytest.approx(2e-25)


def test_materials_file_errors(tmp_path):
    bad = tmp_path / "bad.dat"
    bad.write_text("ktp 810 1.84\n")
    with pytest.raises(ConfigError):
        load_materials(bad)
    bad.write_text("ktp 810nm 1.84 1.76 200\n")
    with pytest.raises(ConfigError):
        load_materials(bad)
    with pytest.raises(ConfigError):
        lookup_material("unobtainium")


def test_sum_difference_ratio():
    assert sum_difference_ratio(1e-6, 1e-15) == pytest.approx(1e9)
    with pytest.raises(ValidationError):
        sum_difference_ratio(0.0, 1e-15)
