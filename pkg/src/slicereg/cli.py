"""Command-line interface: ``slicereg <subcommand> [options]``.

Exit status is 0 when every verdict passes, 1 when a theorem check reports a
violation, and 2 for configuration or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import functionals as fn
from .geometry import (
    EXACT_BUDGET,
    PointCloud,
    diameter,
    n_diameter_exact,
    n_diameter_exchange,
)
from .optimize import OptimizerConfig
from .series import RegularSeries, evaluate, star_product
from .verify import DEFAULT_SELECTION, EnsembleSpec, run_suite, verdicts_to_json

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad command-line input; reported with exit status 2."""


def parse_r_grid(text: str) -> np.ndarray:
    """``a:b:steps`` gives ``steps`` equally spaced radii from ``a`` to ``b``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"--r-grid expects a:b:steps, got {text!r}")
    try:
        a, b, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InputError(f"--r-grid expects a:b:steps, got {text!r}") from exc
    if steps < 1 or not 0 < a <= b < 1 or (steps == 1 and a != b) or (steps > 1 and a == b):
        raise InputError(f"invalid r-grid {text!r}")
    return np.linspace(a, b, steps)


def _parse_point(text: str) -> np.ndarray:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise InputError(f"point must be w,x,y,z, got {text!r}") from exc
    if len(vals) != 4:
        raise InputError(f"point must have four coordinates, got {text!r}")
    return np.array(vals)


def _read_json(source: str):
    """A JSON document given inline or as a path (``-`` reads stdin)."""
    try:
        if source.lstrip().startswith(("{", "[")):
            return json.loads(source)
        text = sys.stdin.read() if source == "-" else Path(source).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {source!r}: {exc}") from exc


def _load_series(source: str) -> RegularSeries:
    payload = _read_json(source)
    try:
        return RegularSeries.from_dict(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"not a series document: {exc}") from exc


def _load_cloud(source: str) -> PointCloud:
    payload = _read_json(source)
    try:
        return PointCloud.from_dict(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"not a point cloud document: {exc}") from exc


def _config(args) -> OptimizerConfig:
    kw = {"seed": args.seed, "tolerance": args.tol}
    if args.sphere_grid is not None:
        kw["sphere_grid"] = args.sphere_grid
    if args.multistarts is not None:
        kw["multistarts"] = args.multistarts
    if args.refine is not None:
        kw["refinement_iterations"] = args.refine
    try:
        return OptimizerConfig(**kw)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _report_output(args, report: fn.FunctionalReport, extra: dict) -> str:
    if args.format == "csv":
        keys = sorted(extra)
        return _rows_to_csv(["value"] + keys, [[repr(report.value)] + [extra[k] for k in keys]])
    return _dump({**report.to_dict(), **extra})


# ------------------------------------------------------------- subcommands

def cmd_eval(args) -> int:
    f = _load_series(args.series)
    value = evaluate(f, _parse_point(args.point))
    if args.format == "csv":
        _emit(args, _rows_to_csv(["w", "x", "y", "z"], [[repr(float(v)) for v in value]]))
    else:
        _emit(args, _dump({"value": value.tolist()}))
    return EXIT_OK


def cmd_star(args) -> int:
    f, g = _load_series(args.left), _load_series(args.right)
    _emit(args, star_product(f, g).to_json() + "\n")
    return EXIT_OK


def _cloud_or_series(args):
    if (args.cloud is None) == (args.series is None):
        raise InputError("give exactly one of --cloud or --series")
    if args.series is not None and args.r is None:
        raise InputError("--series needs --r")


def cmd_diam(args) -> int:
    _cloud_or_series(args)
    if args.cloud is not None:
        res = diameter(_load_cloud(args.cloud))
        payload = {"value": res.value, "witnesses": res.witnesses.tolist(), "method": res.method}
        text = _rows_to_csv(["value"], [[repr(res.value)]]) if args.format == "csv" else _dump(payload)
        _emit(args, text)
        return EXIT_OK
    f = _load_series(args.series)
    rep = fn.regular_diameter(f, args.r, _config(args))
    _emit(args, _report_output(args, rep, {"r": args.r}))
    return EXIT_OK


def cmd_ndiam(args) -> int:
    _cloud_or_series(args)
    if args.cloud is not None:
        cloud = _load_cloud(args.cloud)
        if math.comb(len(cloud), args.n) <= EXACT_BUDGET:
            res = n_diameter_exact(cloud, args.n)
        else:
            res = n_diameter_exchange(cloud, args.n, _config(args))
        payload = {"value": res.value, "witnesses": res.witnesses.tolist(), "method": res.method, "n": args.n}
        text = _rows_to_csv(["value", "n"], [[repr(res.value), args.n]]) if args.format == "csv" else _dump(payload)
        _emit(args, text)
        return EXIT_OK
    f = _load_series(args.series)
    rep = fn.regular_n_diameter(f, args.n, args.r, _config(args))
    _emit(args, _report_output(args, rep, {"r": args.r, "n": args.n}))
    return EXIT_OK


def cmd_slice3(args) -> int:
    f = _load_series(args.series)
    rep = fn.slice_3_diameter(f, args.r, _config(args))
    _emit(args, _report_output(args, rep, {"r": args.r}))
    return EXIT_OK


def cmd_profile(args) -> int:
    f = _load_series(args.series)
    radii = parse_r_grid(args.r_grid)
    cfg = _config(args)
    if args.functional == "phi":
        prof = fn.phi_profile(f, args.n, radii, cfg)
    else:
        prof = fn.phi_hat_3_profile(f, radii, cfg)
    if args.format == "json":
        _emit(args, _dump({"functional": prof.functional, "n": prof.n,
                           "r": prof.r_values.tolist(), "value": prof.values.tolist()}))
    else:
        _emit(args, prof.to_csv())
    return EXIT_OK


def _run_verdicts(args, selection) -> int:
    spec = EnsembleSpec(count=args.count, degree=args.degree, coefficient_scale=args.scale,
                        seed=args.seed, affine_every=args.affine_every)
    radii = parse_r_grid(args.r_grid)
    progress = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    verdicts = run_suite(spec, _config(args), selection, r_grid=radii,
                         identity_trials=args.identity_trials, progress=progress)
    if args.format == "csv":
        rows = [[v.theorem, v.trials, v.violations, repr(v.worst_margin), v.passed] for v in verdicts]
        _emit(args, _rows_to_csv(["theorem", "trials", "violations", "worst_margin", "pass"], rows))
    else:
        _emit(args, verdicts_to_json(verdicts))
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_VIOLATION


def cmd_verify(args) -> int:
    if args.theorem not in DEFAULT_SELECTION:
        raise InputError(f"unknown theorem id {args.theorem!r}; choose from {sorted(DEFAULT_SELECTION)}")
    return _run_verdicts(args, {args.theorem})


def cmd_suite(args) -> int:
    if args.theorems is None:
        selection = set(DEFAULT_SELECTION)
    else:
        selection = {t for t in args.theorems.split(",") if t}
        unknown = selection - DEFAULT_SELECTION
        if unknown:
            raise InputError(f"unknown theorem ids {sorted(unknown)}")
    return _run_verdicts(args, selection)


# ------------------------------------------------------------------ parser

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    p.add_argument("--degree", type=int, default=5, help="degree of ensemble members")
    p.add_argument("--count", type=int, default=100, help="ensemble size")
    p.add_argument("--scale", type=float, default=1.0, help="coefficient scale of ensemble members")
    p.add_argument("--affine-every", type=int, default=0,
                   help="make every k-th ensemble member affine (0 disables)")
    p.add_argument("--r-grid", default="0.1:0.9:5", help="radii as a:b:steps")
    p.add_argument("--sphere-grid", type=int, default=None, help="points per sphere sweep")
    p.add_argument("--multistarts", type=int, default=None, help="refined starts per search")
    p.add_argument("--refine", type=int, default=None, help="refinement iterations per start")
    p.add_argument("--tol", type=float, default=1e-6, help="inequality tolerance")
    p.add_argument("--identity-trials", type=int, default=1000, help="trials per algebraic identity")
    p.add_argument("--out", default=None, help="write output to this path instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--verbose", action="store_true", help="progress messages on stderr")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="slicereg", description="Regular diameters of slice regular functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a series at a point")
    p.add_argument("series", help="series JSON (path, inline, or -)")
    p.add_argument("point", help="w,x,y,z")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("star", parents=[common], help="*-product of two series")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_star)

    for name, func, help_text in (("diam", cmd_diam, "diameter of a cloud or regular diameter of a series"),
                                  ("ndiam", cmd_ndiam, "n-diameter of a cloud or regular n-diameter")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--cloud", default=None, help="point cloud JSON")
        p.add_argument("--series", default=None, help="series JSON")
        p.add_argument("--r", type=float, default=None, help="radius of the ball")
        if name == "ndiam":
            p.add_argument("--n", type=int, default=3)
        p.set_defaults(func=func)

    p = sub.add_parser("slice3", parents=[common], help="slice 3-diameter of a series")
    p.add_argument("series")
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_slice3)

    p = sub.add_parser("profile", parents=[common], help="ratio profile along the r-grid (CSV)")
    p.add_argument("series")
    p.add_argument("--functional", choices=("phi", "phi_hat"), default="phi")
    p.add_argument("--n", type=int, default=2)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("verify", parents=[common], help="run one theorem check over the ensemble")
    p.add_argument("theorem", help=f"one of {', '.join(sorted(DEFAULT_SELECTION))}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("suite", parents=[common], help="run a selection of checks over the ensemble")
    p.add_argument("--theorems", default=None, help="comma-separated ids (default: all); empty string for none")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.format is None:
        args.format = "csv" if args.command == "profile" else "json"
    try:
        return args.func(args)
    except (InputError, ValueError, OSError) as exc:
        print(f"slicereg: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
