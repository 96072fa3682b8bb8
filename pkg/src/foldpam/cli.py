"""Command-line front end.

Subcommands
-----------
curve          sample one analytic (or surrogate) force-strain curve
design-space   swept area of a fold-ratio family, raw and normalized
fit            turn test-stand records into curves, kink reports and a surrogate
simulate       run a built-in or JSON-configured control scenario

Lengths are given in mm and pressures in kPa on the command line; everything
is converted to SI before use. Outputs go to ``-o PATH`` (``-`` or omitted for
stdout) and are written atomically. Failures print one JSON object on stderr,
``{"error": <kind>, "message": <text>}``, and exit with 2 (usage), 1 (model or
data error) or 3 (I/O error).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from . import __version__
from .design_space import curve_family, design_space_area
from .errors import FoldpamError
from .geometry import MAX_FOLD_RATIO, make_geometry
from .io import atomic_write_text
from .kink import detect_kink
from .measurements import (
    DatasetMeta,
    Stroke,
    dataset_to_curve,
    default_seed,
    load_measurements,
    load_metadata,
    synthesize_measurements,
)
from .models import (
    DEFAULT_THETA_MIN,
    ModelKind,
    force_at_strain,
    max_strain,
    min_strain,
    sample_curve,
)
from .scenarios import BUILTIN_SCENARIOS, ScenarioConfig, builtin_scenario, run_scenario
from .surrogate import SurrogateModel

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

DEFAULT_FAMILY = (0.0, 0.2, 0.4, 0.52, 0.67)
#: synthetic records start from this contraction angle (rad); the pouch force
#: diverges as the angle goes to zero, which no gauge would ever read
SYNTHETIC_THETA_MIN = 0.3


class UsageError(Exception):
    """Invalid invocation detected after argument parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------ arg types


def _number(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _positive(text: str) -> float:
    value = _number(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _nonnegative(text: str) -> float:
    value = _number(text)
    if value < 0.0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 samples, got {value}")
    return value


def _family(text: str) -> tuple[float, ...]:
    """``fr=0,0.2,0.4`` (the ``fr=`` prefix is optional)."""
    body = text[3:] if text.startswith("fr=") else text
    try:
        values = tuple(float(v) for v in body.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad family {text!r}; expected fr=a,b,c") from None
    if len(values) < 2:
        raise argparse.ArgumentTypeError("a family needs at least two fold ratios")
    if len(set(values)) != len(values):
        raise argparse.ArgumentTypeError(f"duplicate fold ratios in {text!r}")
    for v in values:
        if not 0.0 <= v <= MAX_FOLD_RATIO:
            raise argparse.ArgumentTypeError(f"fold ratio {v:g} outside [0, {MAX_FOLD_RATIO}]")
    return values


# ------------------------------------------------------------ parser


def _add_geometry(p: argparse.ArgumentParser, fold: bool = True, required: bool = True):
    g = p.add_argument_group("geometry and pressure")
    g.add_argument("--w0-mm", type=_positive, required=required, help="unfolded width W0 (mm)")
    g.add_argument("--l0-mm", type=_positive, required=required, help="initial length l0 (mm)")
    g.add_argument("--h-mm", type=_positive, help="pleat depth h for the constricted model (mm)")
    g.add_argument("--pressure-kpa", type=_positive, required=required, help="gauge pressure (kPa)")
    if fold:
        fx = g.add_mutually_exclusive_group()
        fx.add_argument("--wf-mm", type=_nonnegative, help="folded width wf (mm)")
        fx.add_argument("--fold-ratio", type=_nonnegative, help="fold ratio wf/W0")


def _add_output(p: argparse.ArgumentParser, default_format: str):
    p.add_argument("-o", "--output", default="-", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("--plot", metavar="SVG", help="also write an SVG plot here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="foldpam",
        description="Folded pouch muscle models, design spaces and control simulation.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            "examples:\n"
            "  foldpam curve --model pouch --w0-mm 50 --l0-mm 50 --pressure-kpa 12.4 -o c.csv\n"
            "  foldpam design-space --family fr=0,0.2,0.4,0.52,0.67 --w0-mm 50 --l0-mm 50 \\\n"
            "      --pressure-kpa 12.4 -o ds.json\n"
            "  foldpam fit --synthetic -o fit.json\n"
            "  foldpam simulate --scenario geometry-step-load -o trace.csv\n"
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("curve", help="sample one force-strain curve")
    p.add_argument(
        "--model",
        choices=[k.value for k in ModelKind],
        default=ModelKind.POUCH.value,
        help="force model (default: pouch)",
    )
    _add_geometry(p)
    p.add_argument("-n", "--samples", type=_count, default=101, help="number of strain samples")
    p.add_argument("--theta-min", type=_positive, default=DEFAULT_THETA_MIN)
    p.add_argument("--surrogate", metavar="JSON", help="fitted surrogate for --model surrogate")
    p.add_argument("--label", help="curve label")
    _add_output(p, "csv")

    p = sub.add_parser("design-space", help="area swept by a fold-ratio family")
    p.add_argument("--family", type=_family, default=DEFAULT_FAMILY, help="fr=a,b,c,...")
    p.add_argument(
        "--policy",
        choices=[k.value for k in ModelKind if k is not ModelKind.SURROGATE],
        default=ModelKind.STAGED.value,
        help="model used for each member (default: staged)",
    )
    _add_geometry(p, fold=False)
    p.add_argument("-n", "--samples", type=_count, default=101)
    p.add_argument("--theta-min", type=_positive, default=DEFAULT_THETA_MIN)
    _add_output(p, "json")

    p = sub.add_parser("fit", help="curves, kinks and a surrogate from test-stand records")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", action="append", metavar="CSV", help="record (time_s,force_n)")
    src.add_argument(
        "--synthetic",
        action="store_true",
        help="fit seeded synthetic records (seed from FOLDPAM_SEED)",
    )
    p.add_argument("--meta", action="append", metavar="JSON", help="sidecar for each --data")
    p.add_argument("--stroke", choices=[s.value for s in Stroke], default=Stroke.COMPRESSION.value)
    p.add_argument("--noise-n", type=_nonnegative, default=0.02, help="synthetic gauge noise (N)")
    p.add_argument("--surrogate-out", metavar="JSON", help="also write the surrogate alone")
    _add_output(p, "json")

    p = sub.add_parser("simulate", help="run a control scenario")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--scenario", choices=sorted(BUILTIN_SCENARIOS))
    which.add_argument("--config", metavar="JSON", help="scenario configuration file")
    _add_output(p, "csv")
    return parser


# ------------------------------------------------------------ helpers


def _check_writable(path: str | None):
    if path is None or path == "-":
        return
    directory = os.path.dirname(os.path.abspath(path)) or "."
    if not os.path.isdir(directory):
        raise OSError(f"output directory does not exist: {directory}")
    if not os.access(directory, os.W_OK):
        raise OSError(f"output directory not writable: {directory}")
    if os.path.isdir(path):
        raise OSError(f"output path is a directory: {path}")


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)


def _geometry(args, fold: bool = True):
    W0 = args.w0_mm * 1e-3
    l0 = args.l0_mm * 1e-3
    h = None if args.h_mm is None else args.h_mm * 1e-3
    wf = 0.0
    if fold and args.wf_mm is not None:
        wf = args.wf_mm * 1e-3
    elif fold and args.fold_ratio is not None:
        wf = args.fold_ratio * W0
    return make_geometry(W0, l0, wf, h)


def _csv_table(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ------------------------------------------------------------ commands


def _cmd_curve(args):
    geom = _geometry(args)
    P = args.pressure_kpa * 1e3
    surrogate = None
    if args.model == ModelKind.SURROGATE.value:
        if args.surrogate is None:
            raise UsageError("--model surrogate requires --surrogate JSON")
        surrogate = SurrogateModel.from_dict(json.loads(_read_text(args.surrogate)))
    curve = sample_curve(
        args.model,
        geom,
        P,
        n=args.samples,
        theta_min=args.theta_min,
        label=args.label,
        surrogate=surrogate,
    )
    text = curve.to_csv() if args.format == "csv" else _dumps(curve.to_dict())
    return text, curve


def _cmd_design_space(args):
    geom = _geometry(args, fold=False)
    P = args.pressure_kpa * 1e3
    curves = curve_family(
        geom, P, args.family, policy=args.policy, n=args.samples, theta_min=args.theta_min
    )
    region = design_space_area(curves, geom)
    if args.format == "json":
        text = region.to_json()
    else:
        text = _csv_table(
            ("area_n", "a_d_prime", "curve_labels"),
            [(repr(region.area), repr(region.normalized), ";".join(region.curve_labels))],
        )
    return text, curves


def _synthetic_records(noise_n: float, seed: int):
    """Records of a non-ideal pouch family at 12.4 kPa, 50 x 50 mm."""
    geom = make_geometry(0.050, 0.050)
    P = 12.4e3
    records = []
    for i, fr in enumerate(DEFAULT_FAMILY[:-1]):
        g = geom.with_fold_ratio(fr)
        meta = DatasetMeta(P, g.l0, g.W0, fr, travel_rate=10e-3 / 60.0, sample_rate=10.0)
        eps_lo, eps_hi = min_strain(SYNTHETIC_THETA_MIN), max_strain(ModelKind.POUCH_NONIDEAL, g)
        ds = synthesize_measurements(
            lambda e, g=g: force_at_strain(
                ModelKind.POUCH_NONIDEAL, g, P, min(max(e, eps_lo), eps_hi), SYNTHETIC_THETA_MIN
            ),
            eps_hi,
            meta,
            noise_n=noise_n,
            seed=seed + i,
        )
        records.append(ds)
    return records


def _cmd_fit(args):
    if args.synthetic:
        if args.meta:
            raise UsageError("--meta is only used with --data")
        records = _synthetic_records(args.noise_n, default_seed())
    else:
        if not args.meta or len(args.meta) != len(args.data):
            raise UsageError("give exactly one --meta sidecar per --data file")
        records = []
        for data_path, meta_path in zip(args.data, args.meta):
            meta = load_metadata(_read_text(meta_path))
            records.append(load_measurements(_read_text(data_path), meta))

    curves = [dataset_to_curve(ds, args.stroke) for ds in records]
    kinks = [detect_kink(c) for c in curves]
    frs = {c.fold_ratio for c in curves}
    pressures = {c.pressure for c in curves}
    surrogate = None
    if len(frs) == len(curves) >= 2 and len(pressures) == 1:
        surrogate = SurrogateModel.from_curves(curves)

    if args.format == "json":
        text = _dumps(
            {
                "curves": [c.to_dict() for c in curves],
                "kinks": [dict(k.to_dict(), label=c.label) for c, k in zip(curves, kinks)],
                "surrogate": None if surrogate is None else surrogate.to_dict(),
            }
        )
    else:
        rows = [
            (c.label, repr(c.fold_ratio), k.has_kink, repr(k.eps_break),
             repr(k.slope_low), repr(k.slope_high), repr(k.sse_ratio))
            for c, k in zip(curves, kinks)
        ]
        text = _csv_table(
            ("label", "fold_ratio", "has_kink", "eps_break", "slope_low", "slope_high", "sse_ratio"),
            rows,
        )
    extra = {}
    if args.surrogate_out:
        if surrogate is None:
            raise FoldpamError(
                "no surrogate: records need distinct fold ratios and one shared pressure"
            )
        extra[args.surrogate_out] = surrogate.to_json()
    return text, curves, extra


def _cmd_simulate(args):
    if args.config is not None:
        cfg = ScenarioConfig.from_json(_read_text(args.config))
    else:
        cfg = builtin_scenario(args.scenario)
    trace = run_scenario(cfg)
    text = trace.to_csv() if args.format == "csv" else trace.to_json()
    return text, trace


def _fail(kind: str, message: str, code: int) -> int:
    line = json.dumps({"error": kind, "message": " ".join(str(message).split())})
    print(line, file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    try:
        _check_writable(args.output)
        _check_writable(args.plot)
        _check_writable(getattr(args, "surrogate_out", None))
        extra = {}
        if args.command == "curve":
            text, plot_data = _cmd_curve(args)
        elif args.command == "design-space":
            text, plot_data = _cmd_design_space(args)
        elif args.command == "fit":
            text, plot_data, extra = _cmd_fit(args)
        else:
            text, plot_data = _cmd_simulate(args)
        plot_text = None
        if args.plot:
            from .plotting import render_plot

            plot_text = render_plot(plot_data)
        _emit(text, args.output)
        for path, body in extra.items():
            atomic_write_text(path, body)
        if plot_text is not None:
            atomic_write_text(args.plot, plot_text)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except FoldpamError as exc:
        return _fail(type(exc).__name__, exc, EXIT_DOMAIN)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        return _fail("DataFormatError", f"bad input document: {exc}", EXIT_DOMAIN)
    except OSError as exc:
        return _fail("io", exc, EXIT_IO)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
