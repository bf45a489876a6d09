"""Command-line front end.

Exit status: 0 success, 1 invalid input, 2 numerical failure, 3 verify failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import replace

import numpy as np

from . import __version__, coherence, experiment, gaussfit, model, propagation, temporal, verify
from .config import RunConfig, SchmidtBlock, echo_config, load_config, with_overrides
from .errors import BiphotonError, ConfigError, DegenerateState, NumericalError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3

# measured widths from earlier experiments, shown next to the model numbers
LITERATURE = (
    "slit scan, 390 nm pump, 2 mm crystal, 40 um slits: about 13.5 um (error above 10%)",
    "second slit measurement, same laser and crystal: 17 +- 7 um",
    "camera imaging, 355 nm pump, 5 mm crystal, Double-Gaussian fit: 10.9 +- 0.7 um",
)

_DEFAULT_FORMAT = {
    "analyze": "report",
    "density": "csv",
    "propagate": "csv",
    "schmidt": "csv",
    "temporal": "report",
    "slit-scan": "csv",
    "verify": "report",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _um(value: float) -> str:
    return f"{value:.6g} m ({value * 1e6:.4g} um)"


def _fs(value: float) -> str:
    return f"{value:.6g} s ({value * 1e15:.4g} fs)"


def _order_of_magnitude(value_fs: float) -> str:
    exp = int(math.floor(math.log10(value_fs)))
    mant = round(value_fs / 10**exp)
    if mant == 10:
        mant, exp = 1, exp + 1
    return f"{mant}x10^{exp} fs"


def _csv(header, rows, cfg: RunConfig, notes=()) -> str:
    """CSV body preceded by the config echo and then '# -- ' note lines."""
    buf = io.StringIO()
    for line in echo_config(cfg):
        buf.write(f"# {line}\n")
    for line in notes:
        buf.write(f"# -- {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for v in row])
    return buf.getvalue()


def _report(title: str, rows, cfg: RunConfig, extra=()) -> str:
    lines = [f"# {line}" for line in echo_config(cfg)]
    lines.append(title)
    lines.append("-" * len(title))
    width = max((len(label) for label, _ in rows), default=0)
    lines += [f"{label:<{width}}  {text}" for label, text in rows]
    lines += list(extra)
    return "\n".join(lines) + "\n"


def _fits(cfg: RunConfig):
    spdc = cfg.require("spdc")
    return [(name, gaussfit.fit(spdc, name)) for name in cfg.run.estimators]


# ---------------------------------------------------------------- commands


def cmd_analyze(cfg: RunConfig) -> str:
    spdc = cfg.require("spdc")
    rows = [("a", spdc.a, "m^2"), ("sigma_plus", math.sqrt(2) * spdc.sigma_p, "m")]
    for name in gaussfit.ESTIMATORS:
        dg = gaussfit.fit(spdc, name)
        rows.append((f"sigma_x1_minus_x2_{name}", gaussfit.correlation_width(dg), "m"))
    for name, dg in _fits(cfg):
        geo = coherence.birth_zone_number(dg)
        st = gaussfit.stats(dg, cfg.run.log_base_value)
        unit = "bit" if cfg.run.log_base == "2" else "nat"
        rows += [
            (f"N_{name}", geo.n, "1"),
            (f"K_{name}", coherence.schmidt_number(geo.n), "1"),
            (f"mutual_information_{name}", coherence.mutual_information_bits(dg), "bit"),
            (f"mutual_information_nats_{name}", gaussfit.stats(dg, math.e).mutual_information, "nat"),
            (f"joint_entropy_{name}", st.joint_entropy, f"{unit} (differential, lengths in m)"),
            (f"pearson_r_{name}", st.pearson_r, "1"),
            (f"delta_bz_{name}", geo.delta_bz, "m"),
            (f"delta_p_{name}", geo.delta_p, "m"),
        ]
        try:
            rows += [
                (f"g1_width_{name}", coherence.g1_width(dg), "m"),
                (f"g2_width_{name}", coherence.g2_width(dg), "m"),
            ]
        except DegenerateState:
            rows += [(f"g1_width_{name}", math.nan, "m"), (f"g2_width_{name}", math.nan, "m")]
    literature = [f"literature: {line}" for line in LITERATURE]
    if cfg.run.format == "csv":
        return _csv(["quantity", "value", "unit"], rows, cfg, literature)
    text = []
    for label, value, unit in rows:
        if unit == "m":
            text.append((label, _um(value)))
        else:
            text.append((label, f"{value:.6g} {unit}"))
    return _report("biphoton analysis", text, cfg, ["", *literature])


def _gauss(x, sigma):
    return np.exp(-0.5 * (x / sigma) ** 2) / (math.sqrt(2 * math.pi) * sigma)


def cmd_density(cfg: RunConfig) -> str:
    block = cfg.require("density")
    a = block.a if block.a is not None else cfg.require("spdc").a
    sig = {
        "moment_match": math.sqrt(a / 3),
        "peak_match": math.sqrt(8 * a / 9),
        "exact_variance": math.sqrt(9 * a / 5),
    }
    meta = [f"scale parameter a {a!r} m^2"]
    if block.which == "fits":
        rows = [
            (name, s, 1 / (2 * s), math.sqrt(2) * s, 2 * math.sqrt(2 * math.log(2)) * s)
            for name, s in sig.items()
        ]
        return _csv(["estimator", "sigma_minus_m", "sigma_k_minus_per_m", "sigma_x1_minus_x2_m", "fwhm_x_minus_m"], rows, cfg, meta)
    x = np.linspace(block.min, block.max, block.n_points)
    if block.which == "k_minus":
        exact = model.k_minus_density(x, a)
        gauss = [_gauss(x, 1 / (2 * s)) for s in sig.values()]
        header = ["k_minus_per_m", "exact_density_m"] + [f"{n}_gaussian_m" for n in sig]
    else:
        exact = model.x_minus_density(x, a)
        gauss = [_gauss(x, s) for s in sig.values()]
        header = ["x_minus_m", "exact_density_per_m"] + [f"{n}_gaussian_per_m" for n in sig]
    rows = zip(x, exact, *gauss)
    return _csv(header, rows, cfg, meta)


def cmd_propagate(cfg: RunConfig) -> str:
    spdc = cfg.require("spdc")
    block = cfg.require("propagation")
    if not (block.z_list or block.zbar_list or block.z1_list):
        raise ConfigError("[propagation] needs z_list, zbar_list or z1_list/z2_list")
    rows = []
    for name, dg in _fits(cfg):
        scale = spdc.k_p * dg.sigma_plus * dg.sigma_minus
        pairs = [(z, z) for z in block.z_list]
        pairs += [(zb * scale, zb * scale) for zb in block.zbar_list]
        pairs += [(z1, z2) for z1 in block.z1_list for z2 in block.z2_list]
        for z1, z2 in pairs:
            r = propagation.pearson_propagated(dg, propagation.PropagationPlanes(z1, z2, spdc.k_p))
            if z1 == z2:
                far = propagation.propagate_equal(dg, z1, spdc.k_p)
                rows.append((name, z1, z2, r, far.sigma_plus, far.sigma_minus))
            else:
                rows.append((name, z1, z2, r, None, None))
    header = ["estimator", "z1_m", "z2_m", "r", "sigma_tilde_plus_m", "sigma_tilde_minus_m"]
    if cfg.run.format == "report":
        text = [
            (f"{n} z1={z1:.4g} m z2={z2:.4g} m", f"r = {r:.10g}")
            for n, z1, z2, r, *_ in rows
        ]
        return _report("propagated correlation", text, cfg)
    return _csv(header, rows, cfg)


def cmd_schmidt(cfg: RunConfig) -> str:
    block = cfg.schmidt or SchmidtBlock()
    if block.n is not None:
        sources = [("given", block.n)]
    else:
        sources = [(name, dg.n) for name, dg in _fits(cfg)]
    rows, meta, text = [], [], []
    for label, n in sources:
        spectrum = coherence.schmidt_eigenvalues(n, block.n_max)
        meta.append(
            f"{label}: N = {n!r}, K = {spectrum.schmidt_number!r}, "
            f"truncation_mass = {spectrum.truncation_mass!r}, modes = {spectrum.eigenvalues.size}"
        )
        text += [
            (f"{label} N", f"{n:.6g}"),
            (f"{label} K", f"{spectrum.schmidt_number:.6g}"),
            (f"{label} 1/sum(lambda^2)", f"{coherence.participation_ratio(spectrum):.10g}"),
            (f"{label} truncation mass", f"{spectrum.truncation_mass:.3g}"),
            (f"{label} modes kept", str(spectrum.eigenvalues.size)),
        ]
        rows += [(label, i, lam) for i, lam in enumerate(spectrum.eigenvalues)]
    if cfg.run.format == "report":
        return _report("Schmidt spectrum", text, cfg)
    return _csv(["source", "mode", "eigenvalue"], rows, cfg, meta)


def cmd_temporal(cfg: RunConfig) -> str:
    block = cfg.require("temporal")
    rec = temporal.lookup_material(block.crystal, block.center_wavelength_nm, block.materials_file)
    disp = rec.dispersion
    rows = [("type2_full_width_s", temporal.type2_width(block.L_z, disp), "s (top-hat full width)")]
    sigma_pm = None
    if disp.kappa1 != 0:
        sigma_pm = temporal.type1_sigma(block.L_z, disp, "peak_match")
        rows += [
            ("type1_sigma_peak_match_s", sigma_pm, "s (standard deviation)"),
            ("type1_sigma_exact_variance_s", temporal.type1_sigma(block.L_z, disp, "exact_variance"), "s (standard deviation)"),
        ]
    floor = None
    if cfg.filter is not None:
        sw = temporal.filter_sigma_omega(cfg.filter)
        floor = temporal.time_correlation_floor(sw)
        rows += [("filter_sigma_omega", sw, "rad/s"), ("time_correlation_floor_s", floor, "s (standard deviation)")]
    if block.pump_coherence_time is not None and sigma_pm is not None:
        rows.append(("sum_to_difference_ratio", temporal.sum_difference_ratio(block.pump_coherence_time, sigma_pm), "1"))
    meta = [f"material {rec.crystal} (fixture rows are back-derived test inputs)"]
    if cfg.run.format == "csv":
        return _csv(["quantity", "value", "unit"], rows, cfg, meta)
    text = []
    for label, value, unit in rows:
        if unit.startswith("s"):
            text.append((label, _fs(value) + unit[1:]))
        else:
            text.append((label, f"{value:.6g} {unit}"))
    extra = []
    if floor is not None:
        extra.append(f"filter-limited floor is about {_order_of_magnitude(floor * 1e15)}")
    return _report(f"temporal widths, {rec.crystal}, L = {block.L_z!r} m", text, cfg, extra)


def cmd_slit_scan(cfg: RunConfig, workers: int = 1) -> str:
    spdc = cfg.require("spdc")
    scan = cfg.require("slit_scan")
    names = cfg.run.estimators
    name = names[0] if len(names) == 1 else "exact_variance"
    dg = gaussfit.fit(spdc, name)
    params = dg if scan.model == "double_gaussian" else spdc
    hist = experiment.simulate_slit_scan(scan, params, workers=workers)
    if cfg.run.format == "report":
        est = experiment.estimate_conditional_width(hist)
        truth = experiment.analytic_conditional_width(dg)
        text = [
            ("model", scan.model),
            ("Double-Gaussian widths from", name),
            ("coincidences", str(est.total_counts)),
            ("raw histogram std", _um(est.raw_std)),
            ("deconvolved sigma(x1|x2)", f"{_um(est.width)} +- {est.error:.3g} m"),
            ("analytic sigma(x1|x2)", _um(truth)),
            ("relative difference", f"{est.width / truth - 1:+.4f}"),
        ]
        return _report("slit-scan coincidence simulation", text, cfg, ["", *(f"literature: {x}" for x in LITERATURE)])
    return experiment.histogram_csv(hist, echo_config(cfg))


def cmd_verify(cfg: RunConfig | None = None) -> tuple[str, bool]:
    results = verify.run_all()
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{status}  {r.name:<22} deviation {r.deviation:.3e}  tolerance {r.tolerance:.1e}  "
            f"({r.seconds:.2f} s)  {r.detail}"
        )
    ok = all(r.passed for r in results)
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return "\n".join(lines) + "\n", ok


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration file ([section] key = value)")
    common.add_argument("--output", default="-", help="output path, or - for stdout")
    common.add_argument("--format", choices=("csv", "report"))
    common.add_argument("--seed", type=int, help="slit-scan RNG seed (unsigned 64-bit)")
    common.add_argument("--estimator", choices=("moment", "peak", "exact", "all"))
    common.add_argument("--log-base", choices=("2", "e"))

    parser = _Parser(prog="biphoton", description="Spatial correlations of down-converted photon pairs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("analyze", parents=[common], help="width estimates, entanglement and coherence summary")
    sub.add_parser("density", parents=[common], help="exact and Gaussian densities on a grid")
    sub.add_parser("propagate", parents=[common], help="correlation coefficient after free propagation")
    sub.add_parser("schmidt", parents=[common], help="Schmidt eigenvalues")
    sub.add_parser("temporal", parents=[common], help="Type-I / Type-II time correlation widths")
    scan = sub.add_parser("slit-scan", parents=[common], help="Monte Carlo coincidence slit scan")
    scan.add_argument("--workers", type=int, default=1, help="threads for scan positions")
    sub.add_parser("verify", parents=[common], help="run the oracle self-check suite")
    return parser


def _resolve(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    cfg = with_overrides(cfg, estimator=args.estimator, log_base=args.log_base, fmt=args.format, seed=args.seed)
    if cfg.run.format is None:
        cfg = replace(cfg, run=replace(cfg.run, format=_DEFAULT_FORMAT[args.command]))
    return cfg


def _emit(text: str, target: str) -> None:
    if target == "-":
        sys.stdout.write(text)
    else:
        with open(target, "w", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    try:
        if args.command == "verify":
            text, ok = cmd_verify()
            _emit(text, args.output)
            return EXIT_OK if ok else EXIT_VERIFY
        cfg = _resolve(args)
        handlers = {
            "analyze": cmd_analyze,
            "density": cmd_density,
            "propagate": cmd_propagate,
            "schmidt": cmd_schmidt,
            "temporal": cmd_temporal,
            "slit-scan": lambda c: cmd_slit_scan(c, workers=args.workers),
        }
        _emit(handlers[args.command](cfg), args.output)
    except ValidationError as exc:
        print(f"biphoton: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"biphoton: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BiphotonError as exc:  # pragma: no cover - every subclass is one of the above
        print(f"biphoton: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
