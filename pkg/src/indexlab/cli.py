"""Command-line front end: one subcommand per engine, JSON report on stdout.

Exit codes: 0 ok, 1 usage error, 2 domain/parse/consistency error,
3 resource guard exceeded.
"""
from __future__ import annotations

import argparse
import difflib
import json
import math
import sys
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import hodge, lattice, localization, mesh, resolution
from .errors import IndexLabError, ResourceError

SCHEMA_VERSION = 1
INT64_MAX = 2**63 - 1

BUILTIN_SURFACES = ("tetrahedron", "octahedron", "icosahedron", "icosphere", "genus", "holed")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {_with_suggestion(message, self)}")


def _with_suggestion(message: str, parser: argparse.ArgumentParser) -> str:
    if "invalid choice:" in message:
        bad = message.split("invalid choice:", 1)[1].split("'")[1] if "'" in message else ""
        choices = []
        for action in parser._actions:
            if isinstance(action, argparse._SubParsersAction):
                choices = list(action.choices)
            elif action.choices and action.dest != "help":
                choices += [str(c) for c in action.choices]
        close = difflib.get_close_matches(bad, choices, n=1)
        if close:
            return f"{message}; did you mean {close[0]!r}?"
    return message


def _flag_suggestion(flags: Sequence[str], parser: argparse.ArgumentParser) -> str:
    known = [s for a in parser._actions for s in a.option_strings]
    parts = []
    for f in flags:
        close = difflib.get_close_matches(f.split("=")[0], known, n=1)
        parts.append(f"{f} (did you mean {close[0]}?)" if close else f)
    return "unrecognized arguments: " + " ".join(parts)


# -- argument types ------------------------------------------------------------
def nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def float_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None
    if not vals or any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise argparse.ArgumentTypeError("times must be positive numbers")
    return vals


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None


# -- JSON helpers --------------------------------------------------------------
def jsonable(value):
    """Fractions become "p/q", integers beyond 64 bits become decimal strings."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        value = int(value)
        return str(value) if abs(value) > INT64_MAX else value
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))


# -- surfaces --------------------------------------------------------------------
def _add_surface_flags(p: argparse.ArgumentParser, default: str):
    p.add_argument("--mesh", metavar="PATH", help="OFF mesh file (overrides --surface)")
    p.add_argument("--surface", choices=BUILTIN_SURFACES, default=default, help="built-in mesh")
    p.add_argument("--level", type=nonneg_int, default=2, metavar="INT", help="icosphere subdivision level")
    p.add_argument("--genus", type=nonneg_int, default=2, metavar="INT", help="holes (holed) or genus (genus)")
    p.add_argument("--resolution", type=int, default=1, metavar="INT", help="grid refinement of holed meshes")


def load_surface(args) -> mesh.SimplicialSurface:
    if args.mesh:
        return mesh.read_off(args.mesh)
    name = args.surface
    if name == "icosphere":
        return mesh.icosphere(args.level)
    if name == "genus":
        return hodge.genus_surface(args.genus, args.resolution)
    if name == "holed":
        return mesh.holed_rectangle(args.genus, args.resolution)
    return getattr(mesh, name)()


def _counts(s: mesh.SimplicialSurface) -> dict:
    v, e, f = s.counts
    return {"V": v, "E": e, "F": f}


# -- commands ----------------------------------------------------------------------
def cmd_gauss_bonnet(args) -> dict:
    out = {}
    if args.angles is not None:
        if len(args.angles) != 3:
            raise UsageError("gauss-bonnet: --angles needs exactly three values")
        tri = mesh.GeodesicTriangle(*args.angles, radius=args.radius)
        out["spherical_excess"] = mesh.spherical_excess(tri)
        return out
    s = load_surface(args)
    chk = mesh.defect_sum_check(s)
    out.update(_counts(s))
    out.update(chi=mesh.euler_characteristic(s), defect_sum=chk.defect_sum, two_pi_chi=chk.two_pi_chi, residual=chk.residual)
    return out


def cmd_betti(args) -> dict:
    s = load_surface(args)
    bc = args.bc
    if bc == "auto":
        bc = "none" if s.is_closed else "absolute"
    cx = hodge.build_complex(s, bc)
    ker, coker = hodge.collapsed_kernel_cokernel(cx)
    return {
        **_counts(s),
        "boundary_condition": bc,
        "betti": list(hodge.betti_numbers(cx)),
        "collapsed": {"kernel": ker, "cokernel": coker, "index": ker - coker},
    }


def cmd_heat_index(args) -> dict:
    s = load_surface(args)
    cx = hodge.build_complex(s, "none" if s.is_closed else "absolute")
    rep = hodge.hodge_report(cx, args.t)
    values = [v for _, v in rep.supertrace]
    out = rep.to_json()
    out.update(
        _counts(s),
        chi=mesh.euler_characteristic(s),
        max_deviation=max(abs(v - out["index"]) for v in values),
        spread=max(values) - min(values),
    )
    return out


def cmd_double(args) -> dict:
    base = mesh.holed_rectangle(args.genus, args.resolution)
    dbl = hodge.double_surface(base)
    cx = hodge.build_complex(dbl.surface, "none")
    chk = mesh.defect_sum_check(dbl.surface)
    return {
        "genus": args.genus,
        "base_chi": mesh.euler_characteristic(base),
        "chi": mesh.euler_characteristic(dbl.surface),
        **_counts(dbl.surface),
        "betti": list(hodge.betti_numbers(cx)),
        "collapsed_index": hodge.collapsed_index(cx),
        "expected_index": 2 - 2 * args.genus,
        "defect_residual": chk.residual,
    }


def cmd_periods(args) -> dict:
    base = mesh.holed_rectangle(args.genus, args.resolution)
    rep = hodge.circulation_periods(base)
    fields = [hodge.angular_field(c) for c in mesh.hole_centers(args.genus)]
    winding = hodge.field_periods(base, fields)
    det = rep.determinant
    return {
        "genus": args.genus,
        "period_matrix": rep.as_float().tolist(),
        "determinant_sign": (det > 0) - (det < 0),
        "invertible": det != 0,
        "winding": winding.tolist(),
        "winding_error": float(np.abs(winding - np.eye(args.genus)).max()) if args.genus else 0.0,
    }


def cmd_jackpot(args) -> dict:
    return lattice.jackpot_report(args.k, args.mode, args.workers)


def cmd_pick(args) -> dict:
    if args.polygon:
        poly = lattice.read_polygon_csv(args.polygon)
    elif args.vertices:
        poly = lattice.parse_polygon_csv(args.vertices.replace(";", "\n"))
    else:
        raise UsageError("pick: give --polygon PATH or --vertices 'x,y;x,y;...'")
    pc = lattice.pick_count(poly)
    return {
        "area": pc.area,
        "boundary": pc.boundary,
        "interior": pc.interior,
        "total": str(pc.total),
        "interior_enumerated": pc.interior_enumerated,
    }


def cmd_localize(args) -> dict:
    model = localization.WeightedModel(tuple(args.weights), args.fiber)
    res = localization.localized_index(model)
    out = res.to_json()
    out["weights"] = list(model.weights)
    out["fiber"] = f"{args.fiber}k"
    return out


def cmd_cp1_index(args) -> dict:
    cls = localization.cp1_index()
    out = {"class": {"1": cls.c0.to_string(), "h": cls.c1.to_string()}}
    if args.k is not None:
        out["k"] = args.k
        out["index"] = localization.cp1_index(args.k)
    return out


def cmd_curvature(args) -> dict:
    value = localization.curvature_quadrature(args.radius, args.steps)
    exact = args.radius**2 / (args.radius**2 + 1)
    return {"radius": args.radius, "steps": args.steps, "value": value, "exact": exact, "error": abs(value - exact)}


def cmd_resolve(args) -> dict:
    return resolution.resolution_report(args.germ, args.ordering, args.trace)


# -- parser ------------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="indexlab", description=__doc__.splitlines()[0], formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, description=help, formatter_class=fmt)
        p.set_defaults(func=func)
        return p

    p = add("gauss-bonnet", cmd_gauss_bonnet, "angle-defect sum against 2*pi*chi, or a spherical triangle's area")
    _add_surface_flags(p, "icosphere")
    p.add_argument("--angles", type=float, nargs=3, metavar="RAD", help="spherical triangle angles (radians)")
    p.add_argument("--radius", type=positive_float, default=1.0, metavar="REAL", help="sphere radius for --angles")

    p = add("betti", cmd_betti, "Betti numbers from exact ranks, and the collapsed operator index")
    _add_surface_flags(p, "holed")
    p.add_argument("--bc", choices=("auto", "none", "absolute", "relative"), default="auto", help="boundary condition")

    p = add("heat-index", cmd_heat_index, "heat supertrace sum_k (-1)^k Tr exp(-t L_k) at several times")
    _add_surface_flags(p, "genus")
    p.add_argument("--t", type=float_list, default=[0.05, 0.5, 5.0, 50.0], metavar="T1,T2,...", help="times")

    p = add("double", cmd_double, "double a g-holed rectangle into a closed genus-g surface")
    p.add_argument("--genus", type=nonneg_int, default=2, metavar="INT", help="number of holes")
    p.add_argument("--resolution", type=int, default=1, metavar="INT", help="grid refinement")

    p = add("periods", cmd_periods, "period matrix of harmonic 1-cochains around the holes")
    p.add_argument("--genus", type=nonneg_int, default=2, metavar="INT", help="number of holes")
    p.add_argument("--resolution", type=int, default=1, metavar="INT", help="grid refinement")

    p = add("jackpot", cmd_jackpot, "count (q, n, c) >= 0 with 5q + n + c = 5k")
    p.add_argument("--k", type=nonneg_int, default=4000, metavar="INT", help="scale (most quarters)")
    p.add_argument("--mode", choices=("brute", "formula", "both"), default="both", help="counting method")
    p.add_argument("--workers", type=int, default=1, metavar="INT", help="processes for brute enumeration")

    p = add("pick", cmd_pick, "lattice points of a simple polygon via Pick's theorem")
    p.add_argument("--polygon", metavar="PATH", help="CSV file, one 'x,y' per line, counterclockwise")
    p.add_argument("--vertices", metavar="X,Y;X,Y;...", help="inline vertex list")

    p = add("localize", cmd_localize, "fixed-point sum for a weighted projective plane or line")
    p.add_argument("--weights", type=int_list, default=[5, 1, 1], metavar="W0,W1[,W2]", help="coordinate weights")
    p.add_argument("--fiber", type=int, default=5, metavar="INT", help="fiber weight is FIBER*k")

    p = add("cp1-index", cmd_cp1_index, "ch(L_k) td(T) on the projective line")
    p.add_argument("--k", type=nonneg_int, default=None, metavar="INT", help="evaluate at this k (symbolic if absent)")

    p = add("curvature", cmd_curvature, "normalized circulation of the connection form around |z| = R")
    p.add_argument("--radius", type=positive_float, default=1000.0, metavar="REAL", help="circle radius R")
    p.add_argument("--steps", type=int, default=100000, metavar="INT", help="trapezoid nodes (>= 16)")

    p = add("resolve", cmd_resolve, "resolve a plane-curve germ by blow-ups; intersection form of the double cover")
    p.add_argument("--germ", default="y^3+z^5", metavar="POLY", help="germ in two variables")
    p.add_argument("--trace", action="store_true", help="include per-step chart polynomials")
    p.add_argument("--ordering", choices=("canonical", "creation"), default="canonical", help="cycle order")
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, UsageError):
        return 1
    if isinstance(exc, ResourceError):
        return 3
    return 2


def _summary(command: str, status: str, payload: dict) -> str:
    scalars = [f"{k}={v}" for k, v in sorted(payload.items()) if isinstance(v, (str, int, float, bool)) and len(str(v)) < 40]
    return f"indexlab {command}: {status}" + (" (" + ", ".join(scalars[:6]) + ")" if scalars else "")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    report = {"schema_version": SCHEMA_VERSION, "command": argv[0] if argv and not argv[0].startswith("-") else None}
    try:
        args, extra = parser.parse_known_args(argv)
        if extra:
            sub = parser._subparsers._group_actions[0].choices[args.command]
            raise UsageError(f"indexlab {args.command}: {_flag_suggestion(extra, sub)}")
        report["command"] = args.command
        report["inputs"] = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
        result = args.func(args)
        report.update(status="ok", result=result)
        code = 0
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, IndexLabError, ValueError, ArithmeticError, OSError) as exc:
        code = _exit_code(exc) if isinstance(exc, (UsageError, IndexLabError)) else 2
        if isinstance(exc, UsageError):
            kind = "usage"
        elif isinstance(exc, OSError):
            kind = "io"
        else:
            kind = getattr(exc, "kind", "domain")
        report.update(status="error", error={"kind": kind, "message": str(exc)})
    report.setdefault("inputs", {})
    sys.stdout.write(dumps(report) + "\n")
    payload = report.get("result") or report.get("error") or {}
    sys.stderr.write(_summary(str(report["command"]), report["status"], payload) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
