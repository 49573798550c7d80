"""Command line interface.

Exit codes: 0 success or satisfied, 1 violated condition or solver failure,
2 bad input.  Errors go to stderr as JSON objects; numbers printed on stdout
carry 12 significant digits (files written with ``-o`` keep full precision).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .. import angles as ang
from .. import patterns as pat
from ..complex import validate as validate_complex
from ..errors import DomainError, IdealDiskError, InputError
from ..hypvol import prism_volume
from ..uniformize import SolverConfig, maximize
from . import jsonio
from .layout import develop, verify_pattern
from .svg import RenderOptions, render_svg

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT = 0, 1, 2


def _round(obj, digits: int = 12):
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.{digits}g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_round(v, digits) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _round(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, digits) for v in obj]
    return obj


def _emit(obj, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(_round(obj), indent=2, default=str) + "\n")


def _fail(err: dict, code: int) -> int:
    sys.stderr.write(json.dumps(_round(err), default=str) + "\n")
    return code


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    td = jsonio.MeshDocument.from_dict(jsonio.read_json(args.mesh)).decomposition()
    report = validate_complex(td)
    _emit(report.to_dict())
    return EXIT_OK if report.ok else EXIT_VIOLATED


def cmd_uniformize(args) -> int:
    doc = jsonio.MeshDocument.from_dict(jsonio.read_json(args.mesh))
    td = doc.decomposition()
    x0 = np.array(doc.angles) if doc.angles is not None else ang.equal_split_angles(td)
    cfg = SolverConfig(tol_residual=args.tol, max_iter=args.max_iter)
    u = maximize(td, x0, cfg)
    if args.output:
        jsonio.write_json(args.output, jsonio.SolutionDocument.from_structure(td, u))
    _emit(
        {
            "residual": u.residual,
            "objective": u.objective,
            "iterations": u.iterations,
            "angles": u.angles,
        }
    )
    return EXIT_OK


def cmd_check_pattern(args) -> int:
    doc = jsonio.PatternDocument.from_dict(jsonio.read_json(args.pattern))
    td = doc.decomposition()
    p = pat.PatternVector.from_theta(td, doc.theta)
    window = bool(pat.in_window(td, p).all())
    n1 = pat.check_n1(td, p)
    n2 = pat.check_n2_brute(td, p) if args.method == "brute" else pat.check_n2_flow(td, p)
    ok = window and n1.satisfied and n2.satisfied
    _emit(
        {
            "verdict": "satisfied" if ok else "violated",
            "window": window,
            "n1": n1.to_dict(),
            "n2": n2.to_dict(),
        }
    )
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_realize(args) -> int:
    doc = jsonio.PatternDocument.from_dict(jsonio.read_json(args.pattern))
    td = doc.decomposition()
    u = pat.realize_pattern(td, doc.theta)
    if args.output:
        jsonio.write_json(args.output, jsonio.SolutionDocument.from_structure(td, u))
    _emit({"residual": u.residual, "iterations": u.iterations, "angles": u.angles})
    return EXIT_OK


def cmd_render(args) -> int:
    doc = jsonio.SolutionDocument.from_dict(jsonio.read_json(args.solution))
    td = doc.decomposition()
    x = np.array(doc.angles)
    layout = develop(td, x)
    svg = render_svg(layout, RenderOptions(circles=args.circles))
    if args.svg:
        Path(args.svg).write_text(svg, encoding="utf-8")
        checks = verify_pattern(td, layout, x)
        _emit(
            {
                "triangles_placed": len(layout.positions),
                "max_tree_defect": max(layout.tree_defects.values(), default=0.0),
                "max_angle_error": max((c.error for c in checks), default=0.0),
            }
        )
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_volume(args) -> int:
    v = prism_volume(args.A, args.B, args.C, cross_check=True)
    print(f"{v:.12g}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idealdisk",
        description="Uniform hyperbolic structures and ideal disk patterns on triangulated surfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a mesh for manifold structure and counts")
    p.add_argument("mesh")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("uniformize", help="maximize volume in the conformal class of the mesh angles")
    p.add_argument("mesh")
    p.add_argument("--tol", type=float, default=1e-10, help="edge length residual (default 1e-10)")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_uniformize)

    p = sub.add_parser("check-pattern", help="test the linear feasibility conditions of a pattern")
    p.add_argument("pattern")
    p.add_argument("--method", choices=("flow", "brute"), default="flow")
    p.set_defaults(func=cmd_check_pattern)

    p = sub.add_parser("realize", help="find the uniform structure with a given pattern")
    p.add_argument("pattern")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("render", help="develop a solution into the disk and draw it")
    p.add_argument("solution")
    p.add_argument("--circles", action="store_true", help="also draw circumcircles")
    p.add_argument("--svg", help="write SVG here instead of stdout")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("volume", help="ideal prism volume over a triangle with angles A, B, C")
    for name in ("A", "B", "C"):
        p.add_argument(name, type=float)
    p.set_defaults(func=cmd_volume)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, DomainError) as exc:
        return _fail(exc.to_dict(), EXIT_INPUT)
    except IdealDiskError as exc:
        return _fail(exc.to_dict(), EXIT_VIOLATED)
    except (ValueError, TypeError) as exc:
        return _fail({"error": "InputError", "message": str(exc), "details": {}}, EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
