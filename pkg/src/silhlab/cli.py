"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error (parse/validation),
3 numerical failure. Results go to stdout or ``--out``; diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericalError, SilhlabError
from .expectation import (default_threads, exact_expected_silhouette, mc_expected_silhouette,
                          mc_expected_silhouette_length, parse_model)
from .experiments import (SweepConfig, check_theorem_bound, emit_csv, emit_json,
                          fit_exponent, load_records, run_sweep, write_atomic)
from .generators import family_member, generate, parse_family
from .geom import AtInfinity, parse_viewpoint
from .hypotheses import certificate_to_json, certify_family, measure_hypotheses, reports_to_csv
from .mesh import load_mesh, save_obj, save_off, validate
from .silhouette import emit_svg, extract_silhouette
from .surfaces import parse_surface

log = logging.getLogger("silhlab")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Formatter(argparse.ArgumentDefaultsHelpFormatter):
    """Append defaults, except where the help text already explains them."""

    def _get_help_string(self, action):
        text = action.help or ""
        if "default" in text or action.default in (None, False):
            return text
        return super()._get_help_string(action)


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_input(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--mesh", metavar="PATH", help="mesh file (.off or .obj)")
    g.add_argument("--family", metavar="SPEC",
                   help="generated mesh, e.g. icosphere:3, lantern:8,64, strips:32")


def _add_out(p, formats):
    p.add_argument("--out", metavar="PATH", default=None,
                   help="output file, written atomically (default: standard output)")
    p.add_argument("--format", choices=formats, default=None,
                   help="output format (default: from the --out extension, else "
                        f"{formats[0]})")


def _add_threads(p):
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads; results do not depend on it "
                        "(default: $SILHLAB_THREADS or all cores)")


def build_parser() -> argparse.ArgumentParser:
    fmt = _Formatter
    parser = _Parser(prog="silhlab", description="Silhouette size analysis for triangle meshes.",
                     formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen", help="generate a family mesh", formatter_class=fmt,
                       description="Write a generated mesh.")
    p.add_argument("spec", help="family spec: icosphere:L, uvsphere:LAT,LON, cyl:S,R[,caps], "
                                "cylsec:S,R, lantern:K,M, strips:S, saucer:RINGS,SECTORS")
    _add_out(p, ["off", "obj"])

    p = sub.add_parser("info", help="mesh statistics", formatter_class=fmt,
                       description="Validate a mesh and print its statistics as JSON.")
    _add_input(p)
    _add_out(p, ["json"])

    p = sub.add_parser("silhouette", help="extract one silhouette", formatter_class=fmt,
                       description="Extract the silhouette for one viewpoint.")
    _add_input(p)
    p.add_argument("--view", default="random",
                   help="inf:x,y,z (direction), pt:x,y,z (finite point) or random")
    p.add_argument("--seed", type=int, default=0, help="seed for --view random")
    p.add_argument("--svg", metavar="PATH", default=None,
                   help="also write an SVG drawing (viewpoints at infinity only)")
    _add_out(p, ["json"])

    p = sub.add_parser("expect", help="exact and Monte-Carlo expected silhouette size",
                       formatter_class=fmt,
                       description="Expected silhouette size over random viewpoints.")
    _add_input(p)
    p.add_argument("--samples", type=int, default=10000, help="Monte-Carlo samples")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--model", default="inf",
                   help="viewpoint distribution: inf (uniform directions) or ball:cx,cy,cz,r")
    p.add_argument("--length", action="store_true",
                   help="also estimate the mean projected silhouette length")
    _add_threads(p)
    _add_out(p, ["json"])

    p = sub.add_parser("check", help="measure approximation hypotheses", formatter_class=fmt,
                       description="Measure hypothesis witnesses for one mesh, or certify a "
                                   "family when --sizes is given.")
    _add_input(p)
    p.add_argument("--surface", default=None,
                   help="reference surface, e.g. sphere:r=1, torus:R=2,r=0.5, "
                        "cylinder:r=1,h=2,caps=true, cylsec:r=1,h=2, saucer:rext=1 "
                        "(default: the generator's surface)")
    p.add_argument("--grid-depth", type=int, default=4, help="barycentric sampling depth")
    p.add_argument("--sizes", type=_int_list, default=None,
                   help="comma-separated member sizes; --family is then a sweep family "
                        "(icosphere, lantern:K, strips, ...)")
    _add_out(p, ["json", "csv"])

    p = sub.add_parser("sweep", help="scaling sweep over a family", formatter_class=fmt,
                       description="Run a scaling sweep and write one row per member.")
    p.add_argument("--family", required=True,
                   help="sweep family: icosphere, uvsphere, cyl, cylsec, lantern:K, strips, "
                        "saucer")
    p.add_argument("--sizes", type=_int_list, required=True,
                   help="comma-separated, strictly increasing member sizes")
    p.add_argument("--samples", type=int, default=10000,
                   help="Monte-Carlo samples per member (0 skips Monte Carlo)")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--grid-depth", type=int, default=4,
                   help="barycentric sampling depth (0 skips hypotheses)")
    _add_threads(p)
    _add_out(p, ["csv", "json"])

    p = sub.add_parser("fit", help="fit a power law to a sweep", formatter_class=fmt,
                       description="Fit exact expectation ~ c * n^p to sweep output.")
    p.add_argument("--in", dest="input", required=True, metavar="PATH",
                   help="sweep output (.csv or .json)")
    p.add_argument("--silh", type=float, default=None,
                   help="average silhouette length of the surface; adds bound checks")
    _add_out(p, ["json"])
    return parser


def _load_input(args):
    if args.mesh:
        return load_mesh(args.mesh), None
    return generate(parse_family(args.family))


def _out_format(args, default):
    if args.format:
        return args.format
    if args.out:
        ext = Path(args.out).suffix.lower().lstrip(".")
        if ext:
            return ext
    return default


def _emit(args, data: bytes):
    if args.out:
        write_atomic(args.out, data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _json(obj) -> bytes:
    return (json.dumps(obj, indent=2, allow_nan=False) + "\n").encode()


def _finite(*values):
    for v in values:
        if v is not None and not math.isfinite(v):
            raise NumericalError(f"non-finite result {v}")


def cmd_gen(args):
    mesh, _ = generate(parse_family(args.spec))
    fmt = _out_format(args, "off")
    if fmt not in ("off", "obj"):
        raise UsageError(f"unsupported mesh format {fmt!r}")
    _emit(args, save_off(mesh) if fmt == "off" else save_obj(mesh))


def cmd_info(args):
    mesh, _ = _load_input(args)
    st = validate(mesh)
    d = dict(vars(st))
    d["exact_expected"] = exact_expected_silhouette(mesh, mesh.adjacency)
    _emit(args, _json(d))


def cmd_silhouette(args):
    mesh, _ = _load_input(args)
    validate(mesh)
    vp = parse_viewpoint(args.view, np.random.default_rng(args.seed))
    res = extract_silhouette(mesh, mesh.adjacency, vp)
    if args.svg:
        if not isinstance(vp, AtInfinity):
            raise UsageError("--svg needs a viewpoint at infinity")
        write_atomic(args.svg, emit_svg(mesh, mesh.adjacency, res))
    _emit(args, _json(res.to_dict()))


def cmd_expect(args):
    mesh, _ = _load_input(args)
    validate(mesh)
    try:
        model = parse_model(args.model)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = mc_expected_silhouette(mesh, mesh.adjacency, model, args.samples, args.seed,
                                 args.threads)
    _finite(rep.mc_mean, rep.mc_std_error, rep.exact_expected)
    d = rep.to_dict()
    if args.length:
        if rep.exact_expected is None:
            raise UsageError("--length needs the inf viewpoint model")
        mean, se = mc_expected_silhouette_length(mesh, mesh.adjacency, args.samples, args.seed,
                                                 args.threads)
        _finite(mean, se)
        d["mean_length"] = mean
        d["mean_length_std_error"] = se
    _emit(args, _json(d))


def cmd_check(args):
    fmt = _out_format(args, "json")
    if args.sizes:
        if args.mesh:
            raise UsageError("--sizes needs --family")
        specs = [family_member(args.family, s) for s in args.sizes]
        reports = []
        for spec in specs:
            mesh, surf = generate(spec)
            surface = parse_surface(args.surface) if args.surface else surf
            reports.append(measure_hypotheses(mesh, surface, args.grid_depth))
        cert = certify_family(reports)
        if fmt == "csv":
            _emit(args, reports_to_csv(reports))
        else:
            _emit(args, certificate_to_json(cert))
        return
    mesh, surf = _load_input(args)
    validate(mesh)
    if args.surface:
        surf = parse_surface(args.surface)
    if surf is None:
        raise UsageError("--surface is required for mesh files")
    rep = measure_hypotheses(mesh, surf, args.grid_depth)
    if fmt == "csv":
        _emit(args, reports_to_csv([rep]))
    else:
        _emit(args, _json(rep.to_dict()))


def cmd_sweep(args):
    cfg = SweepConfig(args.samples, args.seed, args.grid_depth, args.threads)
    sizes = args.sizes
    if len(sizes) < 3 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise UsageError("--sizes needs at least 3 strictly increasing values")
    family_member(args.family, sizes[0])
    records = run_sweep(lambda s: family_member(args.family, s), sizes, cfg)
    fmt = _out_format(args, "csv")
    _emit(args, emit_json(records) if fmt == "json" else emit_csv(records))


def cmd_fit(args):
    path = Path(args.input)
    fmt = "json" if path.suffix.lower() == ".json" else "csv"
    try:
        records = load_records(path.read_bytes(), fmt)
    except (ValueError, KeyError) as exc:
        raise SilhlabError(f"cannot read sweep records: {exc}") from None
    fit = fit_exponent(records)
    _finite(fit.exponent, fit.coefficient)
    d = fit._asdict()
    if args.silh is not None:
        d["bound_checks"] = [check_theorem_bound(r, args.silh)._asdict() for r in records]
    _emit(args, _json(d))


COMMANDS = {
    "gen": cmd_gen,
    "info": cmd_info,
    "silhouette": cmd_silhouette,
    "expect": cmd_expect,
    "check": cmd_check,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if getattr(args, "threads", None) is None and hasattr(args, "threads"):
        args.threads = default_threads()
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"silhlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SilhlabError, OSError) as exc:
        print(f"silhlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"silhlab {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
