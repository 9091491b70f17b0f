"""Command-line entry point: ``spherepart <subcommand> ...``.

Reports go to stdout as JSON (17 significant digits); diagnostics go to
stderr.  Exit status is 0 on success, 1 when a check or certification
fails, and 2 for usage, file or format errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import jsonio
from .catalog import NAMES, build_named_net, catalog_table
from .geom import GeometryError, isoperimetric_profile
from .net import NetError, Tolerances, parse_net, region_areas, serialize_net, total_perimeter, validate
from .optimizer import (OptimizerConfig, constraint_residuals, discretize, estimate_edge_structure,
                        minimize, perimeter, perturb, to_net)
from .render import render_svg
from .verifier import CLAIM_MAP, verify_all

log = logging.getLogger("spherepart")


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(jsonio.dumps(obj) + "\n")


def _read_net(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from exc
    try:
        return parse_net(text)
    except (NetError, GeometryError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def cmd_catalog(args) -> int:
    if args.export:
        out = Path(args.export)
        out.mkdir(parents=True, exist_ok=True)
        for name in NAMES:
            (out / f"{name}.json").write_text(serialize_net(build_named_net(name).net))
        log.info("wrote %d nets to %s", len(NAMES), out)
    _emit(catalog_table())
    return 0


def cmd_verify(args) -> int:
    constants = {}
    for item in args.constant or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--constant expects NAME=VALUE, got {item!r}")
        constants[key] = val
    if args.claim and args.claim not in CLAIM_MAP:
        raise UsageError(f"unknown claim {args.claim!r}")
    try:
        report = verify_all(constants, claims=[args.claim] if args.claim else None,
                            workers=args.workers)
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc
    for r in report.results:
        margin = "n/a" if r.margin is None else f"{r.margin:.6g}"
        print(f"{r.id} {r.status} margin={margin}" + (f" ({r.note})" if r.note else ""),
              file=sys.stderr)
    _emit(report.to_json())
    return 0 if report.certified else 1


def cmd_check_net(args) -> int:
    net = _read_net(args.file)
    report = validate(net, Tolerances(angle=args.angle_tol, curvature=args.curvature_tol,
                                      area=args.area_tol))
    for c in report.checks:
        if not c.passed:
            log.warning("check %s failed: %s", c.name, c.note)
    try:
        areas = {str(k): v for k, v in region_areas(net).items()}
        per = total_perimeter(net)
    except GeometryError as exc:
        raise UsageError(f"{args.file}: {exc}") from exc
    _emit({"file": str(args.file), "ok": report.ok, "checks": report.to_json(),
           "region_areas": areas, "perimeter": per})
    return 0 if report.ok else 1


def cmd_profile(args) -> int:
    try:
        value = isoperimetric_profile(args.area)
    except GeometryError as exc:
        raise UsageError(str(exc)) from exc
    _emit({"area": args.area, "profile": value})
    return 0


def cmd_optimize(args) -> int:
    net = _read_net(args.net)
    report = validate(net)
    if not (report["trivalence"].passed and report["euler"].passed):
        raise UsageError(f"{args.net}: net is not structurally valid")
    cfg = OptimizerConfig(max_outer_iterations=args.max_iter, tol_g=args.tol_g, tol_c=args.tol_c,
                          seed=args.seed, m=args.m)
    start = perturb(discretize(net, args.m), args.perturb, args.seed)
    result, trace = minimize(start, cfg)
    log.info("optimize: %s after %d steps", trace.status, len(trace.records))
    if args.trace:
        Path(args.trace).write_text(trace.to_csv())
    structure = estimate_edge_structure(result)
    if args.out:
        Path(args.out).write_text(serialize_net(to_net(result)))
    res = constraint_residuals(result)
    _emit({
        "status": trace.status,
        "iterations": len(trace.records),
        "m": args.m,
        "seed": args.seed,
        "perturb": args.perturb,
        "perimeter": perimeter(result),
        "kkt_norm": trace.kkt_norm,
        "max_residual": max(abs(r.value) for r in res),
        "residuals": [{"region": r.region, "value": r.value, "reliable": r.reliable} for r in res],
        "pressures": [float(p) for p in result.pressures],
        "edges": [{"edge": e.edge, "kappa": e.kappa, "deviation": e.deviation,
                   "pressure_mismatch": e.pressure_mismatch} for e in structure.edges],
        "vertex_angles": {str(v): list(a) for v, a in structure.vertex_angles.items()},
        "max_angle_error_deg": structure.max_angle_error_deg,
        "flagged_edges": list(trace.flagged_edges),
    })
    return 0 if trace.converged else 1


def cmd_render(args) -> int:
    net = _read_net(args.net)
    svg, info = render_svg(net, size=args.size)
    Path(args.out).write_text(svg)
    _emit({"out": str(args.out), **info})
    return 0


def _nonneg(text: str) -> float:
    x = float(text)
    if not (math.isfinite(x) and x >= 0):
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return x


def _positive(text: str) -> float:
    x = float(text)
    if not (math.isfinite(x) and x > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spherepart", description="Sphere partitions into equal areas.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("catalog", help="table of the five regular partitions")
    s.add_argument("--export", metavar="DIR", help="also write each net as JSON into DIR")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("verify", help="certify the inequality chain with interval arithmetic")
    s.add_argument("--claim", metavar="ID", help="only this claim and its dependencies")
    s.add_argument("--constant", action="append", metavar="NAME=VALUE",
                   help="override a rational constant, e.g. tetra_upper=11.46")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("check-net", help="validate a net file")
    s.add_argument("file")
    s.add_argument("--angle-tol", type=_positive, default=Tolerances.angle,
                   help="radians; widen for optimizer outputs")
    s.add_argument("--curvature-tol", type=_positive, default=Tolerances.curvature)
    s.add_argument("--area-tol", type=_positive, default=Tolerances.area)
    s.set_defaults(func=cmd_check_net)

    s = sub.add_parser("optimize", help="minimize perimeter from a (perturbed) net")
    s.add_argument("--net", required=True)
    s.add_argument("--m", type=int, default=16, help="points per edge")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--perturb", type=_nonneg, default=0.0, help="max displacement in radians")
    s.add_argument("--max-iter", type=int, default=40, help="outer iterations")
    s.add_argument("--tol-g", type=_positive, default=1e-7)
    s.add_argument("--tol-c", type=_positive, default=1e-9)
    s.add_argument("--trace", metavar="CSV")
    s.add_argument("--out", metavar="FILE", help="converged net with fitted arcs")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("profile", help="isoperimetric profile B(A)")
    s.add_argument("--area", type=float, required=True)
    s.set_defaults(func=cmd_profile)

    s = sub.add_parser("render", help="SVG of both hemispheres")
    s.add_argument("--net", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--size", type=int, default=320, help="pixel diameter of each hemisphere")
    s.set_defaults(func=cmd_render)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if getattr(args, "m", 16) < 3:
        print("spherepart: error: --m must be at least 3", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"spherepart: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
