"""Command-line interface.

Exit codes: 0 success, 1 a verification check failed, 2 usage or
precondition error.  Numeric flags accept decimals and simple expressions
over the literals ``pi`` and ``sqrt2`` (``3*pi/2``, ``-sqrt2``, ``3/5``).
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
from pathlib import Path

from . import closed_form as cf
from . import mesh as meshmod
from . import oracle
from .core import RealizationKind, evaluate
from .errors import MoebiusError
from .region import polylines_to_csv, region_boundary

DEFAULT_DELTA = 0.6
DEFAULT_DELTAS = {
    RealizationKind.SIMPLE: [1.0, 1.41, 1.5, 1.97, 2.5],
    RealizationKind.COMMON: [1.9, 2.0, 2.5],
}
MINMAX_RHOS = [0.0, 0.1, 1.0, 2.0]

_NAMES = {"pi": math.pi, "sqrt2": math.sqrt(2.0)}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_number(text: str) -> float:
    """Decimal number or arithmetic over ``pi`` / ``sqrt2``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise ValueError
    try:
        value = ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def parse_number_list(text: str) -> list[float]:
    return [parse_number(part) for part in text.split(",") if part.strip()]


def _kind(text: str) -> RealizationKind:
    try:
        return RealizationKind(text.lower())
    except ValueError:
        raise argparse.ArgumentTypeError(f"kind must be 'simple' or 'common', got {text!r}") from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path, data, binary=False) -> None:
    if binary:
        Path(path).write_bytes(data)
    else:
        Path(path).write_text(data, encoding="utf-8", newline="\n")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_eval(args) -> int:
    p = evaluate(args.kind, (args.t, args.r))
    print(" ".join(f"{v + 0.0:.12g}" for v in p))
    return 0


def run_suite(suite: str, kind: RealizationKind, delta: float, seed: int, samples: int,
              deltas=None, nt: int = 1024, nr: int = 1024) -> list[oracle.VerificationReport]:
    reports = []
    if suite in ("graph", "all"):
        reports.append(oracle.verify_graph_identity(delta, samples, seed))
    if suite in ("axis", "all"):
        reports.append(oracle.verify_axis_segment(delta))
    if suite in ("profile", "all"):
        reports.append(oracle.verify_self_intersection_profile(delta))
    if suite == "embedding":
        reports.append(oracle.verify_embedding_threshold(kind, deltas or DEFAULT_DELTAS[kind], nt, nr))
    if suite == "all":
        for k in (RealizationKind.SIMPLE, RealizationKind.COMMON):
            reports.append(oracle.verify_embedding_threshold(k, DEFAULT_DELTAS[k], nt, nr))
    if suite in ("minmax", "all"):
        reports.append(oracle.verify_min_max(MINMAX_RHOS))
    return reports


def cmd_verify(args) -> int:
    reports = run_suite(args.suite, args.kind, args.delta, args.seed, args.samples, args.deltas, args.nt, args.nr)
    passed = all(r.passed for r in reports)
    sys.stdout.write(_dump({"suite": args.suite, "pass": passed, "reports": [r.to_json() for r in reports]}))
    return 0 if passed else 1


def cmd_cross_section(args) -> int:
    if args.kind is RealizationKind.SIMPLE:
        cs = cf.cross_section_simple(args.x, args.y, args.delta)
    else:
        cs = cf.cross_section_common(args.x, args.y)
    sys.stdout.write(json.dumps(cs.to_json()) + "\n")
    return 0


def _mesh_summary(m: meshmod.SurfaceMesh) -> dict:
    loops = meshmod.boundary_loops(m)
    return {
        "vertices": m.n_vertices,
        "faces": m.n_faces,
        "welded": m.welded,
        "euler_characteristic": meshmod.euler_characteristic(m),
        "boundary_loops": len(loops),
        "boundary_lengths": [len(loop) for loop in loops],
    }


def _mesh_json(m: meshmod.SurfaceMesh) -> str:
    return _dump({"vertices": m.vertices.tolist(), "params": m.params.tolist(), "faces": m.faces.tolist()})


def _emit_mesh(m: meshmod.SurfaceMesh, fmt: str, out) -> None:
    if fmt == "obj":
        data = meshmod.export_obj(m)
    elif fmt == "json":
        data = _mesh_json(m).encode("utf-8")
    else:
        raise MoebiusError(f"meshes are written as obj or json, not {fmt}")
    if out:
        _write(out, data, binary=True)
    else:
        sys.stdout.buffer.write(data)


def cmd_mesh(args) -> int:
    m = meshmod.tessellate(args.kind, args.delta, args.nt, args.nr, weld=args.weld)
    fmt = args.format or "obj"
    _emit_mesh(m, fmt, args.out)
    summary = _dump(_mesh_summary(m))
    (sys.stdout if args.out else sys.stderr).write(summary)
    return 0


def cmd_patches(args) -> int:
    fmt = args.format or "obj"
    if fmt not in ("obj", "json"):
        raise MoebiusError(f"patches are written as obj or json, not {fmt}")
    out = []
    for spec, m in meshmod.figure_patches(args.delta, args.nt, args.nr):
        path = None
        if args.out:
            path = f"{args.out}_{spec.name}.{fmt}"
            _emit_mesh(m, fmt, path)
        out.append({
            "name": spec.name,
            "t_range": list(spec.t_range),
            "r_range": list(spec.r_range),
            "h2": spec.h2,
            "h3": spec.h3,
            "containment": meshmod.patch_containments(spec, args.delta),
            "vertices": m.n_vertices,
            "faces": m.n_faces,
            "path": path,
        })
    sys.stdout.write(_dump({"delta": args.delta, "patches": out}))
    return 0


def cmd_region(args) -> int:
    lines = region_boundary(args.delta, args.bbox, args.resolution, tol=args.tol)
    fmt = args.format or "csv"
    if fmt == "csv":
        data = polylines_to_csv(lines)
    elif fmt == "json":
        data = _dump({"delta": args.delta,
                      "polylines": [{"closed": pl.closed, "points": pl.points.tolist()} for pl in lines]})
    else:
        raise MoebiusError(f"region boundaries are written as csv or json, not {fmt}")
    if args.out:
        _write(args.out, data)
    else:
        sys.stdout.write(data)
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moebius", description="Two R^3 realisations of the Moebius strip.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, kind_default="simple"):
        p.add_argument("--kind", type=_kind, default=_kind(kind_default))
        p.add_argument("--delta", type=parse_number, default=DEFAULT_DELTA, help="half-width (default 3/5)")

    p = sub.add_parser("eval", help="evaluate a map at (t, r)")
    p.add_argument("--kind", type=_kind, default=RealizationKind.SIMPLE)
    p.add_argument("--t", type=parse_number, required=True)
    p.add_argument("--r", type=parse_number, required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run oracle checks; JSON report on stdout")
    common(p)
    p.add_argument("--suite", choices=["graph", "axis", "profile", "embedding", "minmax", "all"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--deltas", type=parse_number_list, default=None,
                   help="comma-separated half-widths for the embedding suite")
    p.add_argument("--nt", type=int, default=1024)
    p.add_argument("--nr", type=int, default=1024)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cross-section", help="heights over a planar point, as JSON")
    p.add_argument("--kind", type=_kind, default=RealizationKind.SIMPLE)
    p.add_argument("--delta", type=parse_number, default=math.inf,
                   help="half-width for the simple map (default: infinite strip)")
    p.add_argument("--x", type=parse_number, required=True)
    p.add_argument("--y", type=parse_number, required=True)
    p.set_defaults(func=cmd_cross_section)

    p = sub.add_parser("mesh", help="triangle mesh of a whole strip")
    common(p)
    p.add_argument("--nt", type=int, default=256)
    p.add_argument("--nr", type=int, default=16)
    p.add_argument("--weld", action="store_true")
    p.add_argument("--out")
    p.add_argument("--format", choices=["obj", "csv", "json"])
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("patches", help="the four patches around the self-intersection set")
    p.add_argument("--delta", type=parse_number, default=1.97)
    p.add_argument("--nt", type=int, default=64)
    p.add_argument("--nr", type=int, default=32)
    p.add_argument("--out", help="path prefix; one file per patch")
    p.add_argument("--format", choices=["obj", "csv", "json"])
    p.set_defaults(func=cmd_patches)

    p = sub.add_parser("region", help="boundary curves of the planar domain")
    p.add_argument("--delta", type=parse_number, default=DEFAULT_DELTA)
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--bbox", type=parse_number_list, default=None, help="xmin,xmax,ymin,ymax")
    p.add_argument("--tol", type=parse_number, default=1e-3)
    p.add_argument("--out")
    p.add_argument("--format", choices=["obj", "csv", "json"])
    p.set_defaults(func=cmd_region)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "bbox", None) is not None and len(args.bbox) != 4:
        parser.error("--bbox needs four numbers")
    try:
        return args.func(args)
    except MoebiusError as exc:
        print(f"moebius: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"moebius: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
