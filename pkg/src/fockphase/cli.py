"""Command line front end.

Every subcommand writes one JSON report (or CSV for ``sample``) to ``--out``
or standard output. Reports carry ``"schema": 1``; wall-clock information is
kept under ``"metadata"`` so the rest of the report is reproducible.

Exit status: 0 success, 1 library error (JSON on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from fockphase.errors import FockPhaseError, SchemaError
from fockphase.fock_core import FockPolynomial, closed_form_from_json, expansion_from_json, hermite_to_fock
from fockphase.lattice_geometry import (
    PointSet,
    ShiftedLattice,
    StructuredSet,
    canonical_progressions,
    check_lattice_conditions,
    enumerate_points,
    estimate_lower_density,
    separation,
)
from fockphase.retrieval import (
    MagnitudeSamples,
    counterexample_pair,
    earl_bound_check,
    forward_sample,
    growth_type_estimate,
    lattice_counterexample,
    reconstruct,
    verify_counterexample,
)

SCHEMA_VERSION = 1


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def _read_text(path: str) -> str:
    return Path(path).read_text()


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _positive(kind):
    def parse(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return parse


def _nonneg(kind):
    def parse(text):
        v = kind(text)
        if v < 0 or (isinstance(v, float) and math.isnan(v)):
            raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
        return v

    return parse


def _lattice(args) -> ShiftedLattice:
    return ShiftedLattice.from_json(_read_json(args.lattice))


def _structured_set(args) -> StructuredSet:
    if args.set:
        return StructuredSet.from_json(_read_json(args.set))
    if getattr(args, "lattice", None):
        return canonical_progressions(_lattice(args), truncation=args.truncation)
    raise SchemaError("either --set or --lattice is required")


# ---------------------------------------------------------------------------
# subcommands


def cmd_check_lattice(args) -> dict:
    report = check_lattice_conditions(_lattice(args), args.tau, args.kappa)
    return report.to_json()


def cmd_density(args) -> dict:
    if args.points:
        P = PointSet.from_csv(_read_text(args.points))
    elif args.lattice:
        P = enumerate_points(_lattice(args), args.radius)
    else:
        raise SchemaError("either --points or --lattice is required")
    est = estimate_lower_density(P, args.radii, args.step, scan_extent=args.scan_extent)
    return {"estimate": est, "separation": separation(P), "n_points": len(P), "radii": args.radii, "step": args.step}


def cmd_sample(args) -> str:
    doc = _read_json(args.poly)
    f = expansion_from_json(doc)
    p = f if isinstance(f, FockPolynomial) else hermite_to_fock(f)
    return forward_sample(p, _structured_set(args)).to_csv()


def cmd_reconstruct(args) -> dict:
    S = _structured_set(args)
    samples = MagnitudeSamples.from_csv(_read_text(args.samples), S)
    result = reconstruct(samples, args.qmax)
    return result.to_json()


def cmd_counterexample(args) -> dict:
    if args.lattice:
        L = _lattice(args)
        report = check_lattice_conditions(L, 0.0, args.kappa)
        condition = "spacing" if not report.spacing_ok else "distance"
        cx = lattice_counterexample(L, condition)
        ver = verify_counterexample(cx.pair, cx.a, args.n_points, args.tol, cx.rotation, cx.anchor)
        return {
            "conditions": report.to_json(),
            "condition": condition,
            "a": cx.a,
            "rotation": cx.rotation,
            "exponential_type": cx.exponential_type,
            "pair": [f.to_json() for f in cx.pair],
            "verification": ver.to_json(),
        }
    pair = counterexample_pair(args.a)
    ver = verify_counterexample(pair, args.a, args.n_points, args.tol)
    return {"a": args.a, "exponential_type": math.pi / (2 * args.a), "pair": [f.to_json() for f in pair], "verification": ver.to_json()}


def cmd_growth(args) -> dict:
    f = closed_form_from_json(_read_json(args.function))
    out = {}
    if args.radii:
        out["growth"] = growth_type_estimate(f, args.rho, args.radii, args.angles).to_json()
    if args.lattice:
        out["earl"] = earl_bound_check(f, _lattice(args), args.h, args.radius).to_json()
    if not out:
        raise SchemaError("growth needs --radii and/or --lattice")
    return out


COMMANDS = {
    "check-lattice": cmd_check_lattice,
    "density": cmd_density,
    "sample": cmd_sample,
    "reconstruct": cmd_reconstruct,
    "counterexample": cmd_counterexample,
    "growth": cmd_growth,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockphase", description="Phase retrieval from Bargmann magnitudes on structured sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (default: stdout)")
        return p

    p = common(sub.add_parser("check-lattice", help="density, spacing and line-distance conditions"))
    p.add_argument("--lattice", required=True)
    p.add_argument("--tau", type=_nonneg(float), default=0.0)
    p.add_argument("--kappa", type=_nonneg(float), default=0.0)

    p = common(sub.add_parser("density", help="windowed lower-density estimate"))
    p.add_argument("--points", help="CSV of points (re,im)")
    p.add_argument("--lattice")
    p.add_argument("--radius", type=_positive(float), default=300.0, help="truncation radius for --lattice")
    p.add_argument("--radii", type=_float_list, default=[50.0, 100.0, 200.0])
    p.add_argument("--step", type=_positive(float), default=0.25)
    p.add_argument("--scan-extent", type=_positive(float), default=2.0)

    p = common(sub.add_parser("sample", help="magnitudes of a polynomial on a structured set (CSV)"))
    p.add_argument("--poly", required=True, help='JSON {"basis": "monomial"|"hermite", "coeffs": [[re, im], ...]}')
    p.add_argument("--set")
    p.add_argument("--lattice")
    p.add_argument("--truncation", type=_positive(int), default=20)

    p = common(sub.add_parser("reconstruct", help="recover a polynomial up to global phase"))
    p.add_argument("--samples", required=True)
    p.add_argument("--set")
    p.add_argument("--lattice")
    p.add_argument("--truncation", type=_positive(int), default=20)
    p.add_argument("--qmax", type=_nonneg(int), default=8)

    p = common(sub.add_parser("counterexample", help="build and verify a non-uniqueness pair"))
    p.add_argument("--a", type=_positive(float), default=1.0)
    p.add_argument("--lattice", help="build the pair for a lattice violating spacing or distance")
    p.add_argument("--kappa", type=_nonneg(float), default=math.pi / 2)
    p.add_argument("--n-points", type=_positive(int), default=1000)
    p.add_argument("--tol", type=_positive(float), default=1e-12)

    p = common(sub.add_parser("growth", help="type estimate and lattice growth diagnostic"))
    p.add_argument("--function", required=True, help='closed-form JSON with "kind"')
    p.add_argument("--rho", type=_positive(float), default=1.0)
    p.add_argument("--radii", type=_float_list)
    p.add_argument("--angles", type=int, default=720)
    p.add_argument("--lattice")
    p.add_argument("--h", choices=["linear", "log"], default="linear")
    p.add_argument("--radius", type=_positive(float), default=50.0)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        result = COMMANDS[args.command](args)
    except FockPhaseError as exc:
        err = {"schema": SCHEMA_VERSION, "command": args.command, "error": exc.code, "message": str(exc)}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 1
    except (OSError, ValueError) as exc:
        code = "io" if isinstance(exc, OSError) else "domain"
        err = {"schema": SCHEMA_VERSION, "command": args.command, "error": code, "message": str(exc)}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 1
    if isinstance(result, str):
        _emit(result, args.out)
        return 0
    report = {
        "schema": SCHEMA_VERSION,
        "command": args.command,
        "result": _plain(result),
        "metadata": {"elapsed_seconds": time.perf_counter() - started},
    }
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _plain(obj):
    """Make numpy scalars and non-finite floats JSON friendly."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


if __name__ == "__main__":
    sys.exit(main())
