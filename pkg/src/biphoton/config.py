"""Run configuration: bracketed sections of ``key = value`` lines.

All lengths are plain SI numbers (``3.9e-07``, not ``390nm``); anything that
``float()`` rejects is an error, which keeps unit suffixes out.  Unknown
sections and keys are rejected by name.  :func:`echo_config` writes a
resolved configuration back out in the same format so it can be embedded in
output headers and parsed again.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError, ValidationError
from .experiment import MODELS, SlitScanConfig
from .model import SpdcConfig
from .temporal import SpectralFilter

ESTIMATOR_FLAGS = {
    "moment": "moment_match",
    "peak": "peak_match",
    "exact": "exact_variance",
}
DENSITY_KINDS = ("k_minus", "x_minus", "fits")
FORMATS = ("csv", "report")


@dataclass(frozen=True)
class RunOptions:
    estimator: str = "all"  # moment | peak | exact | all
    log_base: str = "2"  # 2 | e
    format: str | None = None  # per-command default when unset

    def __post_init__(self):
        if self.estimator not in (*ESTIMATOR_FLAGS, "all"):
            raise ConfigError(f"estimator must be moment, peak, exact or all, got {self.estimator!r}")
        if self.log_base not in ("2", "e"):
            raise ConfigError(f"log_base must be 2 or e, got {self.log_base!r}")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"format must be csv or report, got {self.format!r}")

    @property
    def estimators(self) -> tuple[str, ...]:
        if self.estimator == "all":
            return tuple(ESTIMATOR_FLAGS.values())
        return (ESTIMATOR_FLAGS[self.estimator],)

    @property
    def log_base_value(self) -> float:
        return 2.0 if self.log_base == "2" else math.e


@dataclass(frozen=True)
class PropagationBlock:
    z_list: tuple[float, ...] = ()
    zbar_list: tuple[float, ...] = ()
    z1_list: tuple[float, ...] = ()
    z2_list: tuple[float, ...] = ()

    def __post_init__(self):
        if bool(self.z1_list) != bool(self.z2_list):
            raise ConfigError("z1_list and z2_list must be given together")


@dataclass(frozen=True)
class DensityBlock:
    which: str = "x_minus"
    min: float = -1.0
    max: float = 1.0
    n_points: int = 201
    a: float | None = None

    def __post_init__(self):
        if self.which not in DENSITY_KINDS:
            raise ConfigError(f"density which must be one of {DENSITY_KINDS}, got {self.which!r}")
        if not (self.max > self.min and self.n_points >= 2):
            raise ValidationError("density grid needs max > min and n_points >= 2")


@dataclass(frozen=True)
class SchmidtBlock:
    n: float | None = None
    n_max: int | None = None


@dataclass(frozen=True)
class TemporalBlock:
    crystal: str = "fixture-type2"
    center_wavelength_nm: float | None = None
    L_z: float = 5e-4
    materials_file: str | None = None
    pump_coherence_time: float | None = None


@dataclass(frozen=True)
class RunConfig:
    spdc: SpdcConfig | None = None
    run: RunOptions = field(default_factory=RunOptions)
    propagation: PropagationBlock | None = None
    density: DensityBlock | None = None
    schmidt: SchmidtBlock | None = None
    temporal: TemporalBlock | None = None
    filter: SpectralFilter | None = None
    slit_scan: SlitScanConfig | None = None

    def require(self, section: str):
        value = getattr(self, section)
        if value is None:
            raise ConfigError(f"config lacks a [{section}] section")
        return value


# per-section key -> parser; optional keys have None defaults in the dataclass
_FLOAT, _INT, _STR, _FLOATS = "float", "int", "str", "floats"
_SCHEMA = {
    "spdc": (SpdcConfig, {"lambda_p": _FLOAT, "L_z": _FLOAT, "sigma_p": _FLOAT, "d_eff": _FLOAT, "P_p": _FLOAT}),
    "run": (RunOptions, {"estimator": _STR, "log_base": _STR, "format": _STR}),
    "propagation": (
        PropagationBlock,
        {"z_list": _FLOATS, "zbar_list": _FLOATS, "z1_list": _FLOATS, "z2_list": _FLOATS},
    ),
    "density": (DensityBlock, {"which": _STR, "min": _FLOAT, "max": _FLOAT, "n_points": _INT, "a": _FLOAT}),
    "schmidt": (SchmidtBlock, {"n": _FLOAT, "n_max": _INT}),
    "temporal": (
        TemporalBlock,
        {
            "crystal": _STR,
            "center_wavelength_nm": _FLOAT,
            "L_z": _FLOAT,
            "materials_file": _STR,
            "pump_coherence_time": _FLOAT,
        },
    ),
    "filter": (SpectralFilter, {"center_wavelength": _FLOAT, "bandwidth_fwhm": _FLOAT}),
    "slit_scan": (
        SlitScanConfig,
        {
            "slit_width": _FLOAT,
            "fixed_slit_position": _FLOAT,
            "scan_min": _FLOAT,
            "scan_max": _FLOAT,
            "scan_steps": _INT,
            "pairs_per_step": _INT,
            "total_pairs": _INT,
            "rng_seed": _INT,
            "model": _STR,
        },
    ),
}


def _parse_value(kind: str, text: str, where: str):
    text = text.strip()
    try:
        if kind == _FLOAT:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError("not finite")
            return value
        if kind == _INT:
            return int(text)
        if kind == _FLOATS:
            return tuple(_parse_value(_FLOAT, t, where) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError(
            f"{where}: cannot read {text!r} as a plain number (SI units only, no suffixes)"
        ) from None
    return text


def _build_section(name: str, items: dict[str, str]):
    cls, keys = _SCHEMA[name]
    values = {}
    for key, raw in items.items():
        if key not in keys:
            raise ConfigError(f"[{name}] unknown key {key!r}; allowed: {', '.join(keys)}")
        values[key] = _parse_value(keys[key], raw, f"[{name}] {key}")
    if name == "slit_scan":
        total = values.pop("total_pairs", None)
        if total is not None:
            if "pairs_per_step" in values:
                raise ConfigError("[slit_scan] give pairs_per_step or total_pairs, not both")
            steps = values.get("scan_steps", 0)
            if steps < 1:
                raise ConfigError("[slit_scan] total_pairs needs scan_steps")
            values["pairs_per_step"] = total // steps
        values.setdefault("rng_seed", 0)
        values.setdefault("fixed_slit_position", 0.0)
    try:
        return cls(**values)
    except TypeError as exc:
        raise ConfigError(f"[{name}] {exc}") from None


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, default_section="__none__", delimiters=("=",), comment_prefixes=("#", ";")
    )
    parser.optionxform = str  # keys are case sensitive (L_z)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    sections = {}
    for name in parser.sections():
        if name not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{name}]; allowed: {', '.join(_SCHEMA)}")
        sections[name] = _build_section(name, dict(parser.items(name)))
    return RunConfig(**sections)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, str(path))


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def echo_config(cfg: RunConfig) -> list[str]:
    """Lines that :func:`parse_config_text` turns back into ``cfg``."""
    lines = []
    for name in _SCHEMA:
        block = getattr(cfg, name)
        if block is None:
            continue
        lines.append(f"[{name}]")
        for f in fields(block):
            value = getattr(block, f.name)
            if value is None or value == ():
                continue
            lines.append(f"{f.name} = {_format_value(value)}")
    return lines


def config_from_echo(text: str) -> RunConfig:
    """Parse the '#'-prefixed echo block at the top of an output file.

    Note lines ('# -- ...') and everything after the header comments are ignored.
    """
    body = []
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        line = line[1:].strip()
        if not line.startswith("--"):
            body.append(line)
    return parse_config_text("\n".join(body), "<echo>")


def with_overrides(cfg: RunConfig, estimator=None, log_base=None, fmt=None, seed=None) -> RunConfig:
    run = cfg.run
    run = RunOptions(
        estimator=estimator if estimator is not None else run.estimator,
        log_base=log_base if log_base is not None else run.log_base,
        format=fmt if fmt is not None else run.format,
    )
    cfg = replace(cfg, run=run)
    if seed is not None and cfg.slit_scan is not None:
        cfg = replace(cfg, slit_scan=replace(cfg.slit_scan, rng_seed=int(seed)))
    return cfg


__all__ = [
    "DENSITY_KINDS",
    "ESTIMATOR_FLAGS",
    "MODELS",
    "RunConfig",
    "RunOptions",
    "config_from_echo",
    "echo_config",
    "load_config",
    "parse_config_text",
    "with_overrides",
]
