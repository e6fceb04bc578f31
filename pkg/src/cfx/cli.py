"""Command-line surface: orbits, attractors, densities, checks, figures.

Exit codes: 0 success, 1 a verification or convergence failure, 2 a
structural refusal (the requested computation does not exist for the
system, e.g. no compact invariant set), 3 configuration or I/O errors.

All commands are deterministic for fixed flags (randomness is seeded), so
rerunning a command reproduces its artifacts byte for byte.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import engine, measure, serialize, svgplot
from .catalog import BUILTIN_NAMES, RawMap, ReferenceSheet, make_system
from .errors import (
    BadCSV,
    BadInput,
    BadParameter,
    CfxError,
    GridMismatch,
    NoConvergence,
    NoTailBound,
    OrbitEscapes,
    StructuralRefusal,
    ZeroMass,
)
from .mobius import PiecewiseSystem
from .skew import dual_step, jacobian_determinant, skew_step, to_dual
from .errors import Singular, StraddlesBranchBoundary

__all__ = ["main", "build_parser"]

CHECKS = ("ruelle", "invariance", "disjointness", "conjugacy", "jacobian")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; config errors are 3 here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(3)


def _parse_params(pairs):
    out = {}
    for item in pairs:
        if "=" not in item:
            raise BadParameter(f"--param needs KEY=VALUE, got {item!r}")
        key, text = item.split("=", 1)
        try:
            value = int(text)
        except ValueError:
            try:
                value = float(text)
            except ValueError:
                value = text
        out[key] = value
    return out


def _resolve_system(args):
    """Builtin name (+ --param) or a system JSON path -> (system, sheet)."""
    name = args.system
    params = _parse_params(args.param)
    if name in BUILTIN_NAMES:
        return make_system(name, params)
    if name.endswith(".json") or os.path.exists(name):
        if params:
            raise BadParameter("--param applies only to builtin systems")
        system = serialize.system_from_obj(serialize.read_json(name))
        return system, ReferenceSheet()
    raise BadParameter(
        f"unknown system {name!r}; builtins: {', '.join(BUILTIN_NAMES)}"
    )


def _parse_start(text, system):
    if text is None:
        return None
    if not isinstance(system, (PiecewiseSystem, RawMap)):
        return complex(text)
    parts = text.split(",")
    if len(parts) == 1:
        return float(parts[0])
    if len(parts) == 2:
        return (float(parts[0]), float(parts[1]))
    raise BadParameter(f"--start takes X or X,Y, got {text!r}")


def _fmt(v):
    return format(float(v), ".6g")


# ---------------------------------------------------------------------------
# commands


def cmd_orbit(args):
    system, _ = _resolve_system(args)
    cloud = measure.orbit_cloud(
        system,
        form=args.form,
        start=_parse_start(args.start, system),
        burn=args.burn,
        count=args.points,
    )
    serialize.write_orbit_csv(args.output, cloud)
    pts = cloud.points
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    box = " x ".join(f"[{_fmt(a)}, {_fmt(b)}]" for a, b in zip(lo, hi))
    print(f"wrote {args.output}: {len(pts)} points, form {cloud.form}")
    print(f"bounds {box}")
    usage = {}
    for lab in cloud.labels:
        usage[lab] = usage.get(lab, 0) + 1
    top = sorted(usage.items(), key=lambda kv: (-kv[1], kv[0]))[:8]
    for lab, cnt in top:
        print(f"branch {lab}: {cnt}")
    if len(usage) > 8:
        print(f"... and {len(usage) - 8} more branches")
    return 0


def cmd_attract(args):
    system, _ = _resolve_system(args)
    if not isinstance(system, PiecewiseSystem):
        raise StructuralRefusal(
            f"{args.system}: no branch matrices; the attractor engine applies "
            "only to piecewise homographic interval systems"
        )
    grid, report = engine.fixed_point(
        system,
        n_cells=args.grid,
        tol=args.tol,
        max_iter=args.max_iter,
        level=args.truncation,
    )
    serialize.save_attractor(args.output, system, grid, report)
    print(
        f"wrote {args.output}: converged in {report.iterations} iterations, "
        f"final distance {_fmt(report.final_distance)}, k = {_fmt(report.k)}, "
        f"N = {report.N}, mass = {_fmt(grid.total_mass())}"
    )
    return 0


def cmd_density(args):
    system, grid, _ = serialize.load_attractor(args.input)
    profile = measure.density_profile(grid, normalize=True)
    serialize.write_density_csv(args.output, profile)
    print(f"wrote {args.output}: {grid.n_cells} cells")
    print(f"Z = {grid.total_mass():.6f}")
    return 0


def _sample_grid(args, system):
    if args.input:
        file_system, grid, report = serialize.load_attractor(args.input)
        if getattr(file_system, "name", None) != getattr(system, "name", None):
            raise BadParameter(
                f"attractor file holds {file_system.name!r}, not the requested system"
            )
        level = report.get("N") if isinstance(report, dict) else None
        return system, grid, level
    grid, report = engine.fixed_point(
        system, n_cells=args.grid, tol=args.tol, max_iter=args.max_iter,
        level=args.truncation,
    )
    return system, grid, report.N


def _check_ruelle(args, system, sheet):
    if sheet.density is None:
        raise StructuralRefusal(
            f"{args.system}: no closed-form invariant density to check"
        )
    if isinstance(system, RawMap):
        lo = 0.05 if system.domain[0] >= 0.0 else -5.0
        xs = np.linspace(lo, 5.0, 100)
        if system.domain[0] < 0.0:
            xs = xs[np.abs(xs) > 0.04]
        residual = measure.ruelle_residual(system, sheet.density, xs=xs)
        return residual, 1e-10
    level = None
    if not system.is_finite:
        level = args.truncation or engine.truncation_level(system, args.tol / 2.0)
    lo, hi = system.interval
    xs = lo + (np.arange(100) + 0.5) * ((hi - lo) / 100.0)
    residual = measure.ruelle_residual(system, sheet.density, xs=xs, level=level)
    return residual, args.tol


def cmd_verify(args):
    system, sheet = _resolve_system(args)
    check = args.check
    results = []
    if check == "ruelle":
        residual, threshold = _check_ruelle(args, system, sheet)
        results.append(("ruelle residual", residual, threshold))
    elif check == "invariance":
        if not isinstance(system, PiecewiseSystem):
            raise StructuralRefusal(f"{args.system}: no set-map form")
        system, grid, level = _sample_grid(args, system)
        residual = engine.invariance_residual(system, grid, level=level)
        results.append(("invariance residual", residual, 5.0 * args.tol))
    elif check == "disjointness":
        if not isinstance(system, PiecewiseSystem):
            raise StructuralRefusal(f"{args.system}: no set-map form")
        system, grid, level = _sample_grid(args, system)
        overlap = engine.image_overlap(system, grid, level=level)
        defect = engine.surjectivity_defect(system, grid, level=level)
        bound = args.tol * grid.total_mass()
        results.append(("image overlap", overlap, bound))
        results.append(("surjectivity defect", defect, bound))
    elif check in ("conjugacy", "jacobian"):
        if not isinstance(system, PiecewiseSystem):
            raise StructuralRefusal(f"{args.system}: no skew form")
        system, grid, _ = _sample_grid(args, system)
        samples = measure.sample_attractor(grid, count=args.points, seed=args.seed)
        worst = 0.0
        skipped = 0
        for x, y in samples:
            try:
                if check == "conjugacy":
                    (xs, ys), _ = skew_step(system, (x, y))
                    _, v = to_dual((x, y))
                    (xd, vd), _ = dual_step(system, (x, v))
                    _, v_direct = to_dual((xs, ys))
                    err = max(abs(xd - xs), abs(vd - v_direct))
                else:
                    err = abs(jacobian_determinant(system, (x, y)) - 1.0)
            except (Singular, StraddlesBranchBoundary, CfxError):
                skipped += 1
                continue
            worst = max(worst, err)
        if skipped > len(samples) // 100:
            raise StructuralRefusal(
                f"{skipped} of {len(samples)} sample points not evaluable"
            )
        threshold = 1e-10 if check == "conjugacy" else 1e-5
        results.append((f"{check} error ({len(samples) - skipped} points)",
                        worst, threshold))
    ok = True
    for name, value, threshold in results:
        passed = value <= threshold
        ok = ok and passed
        print(
            f"check {check}: {name} = {value:.6g} "
            f"(threshold {threshold:.6g}): {'PASS' if passed else 'FAIL'}"
        )
    return 0 if ok else 1


def cmd_gauss_kuzmin(args):
    cdf, deviation = measure.gauss_kuzmin_experiment(
        samples=args.samples, depth=args.depth, bins=args.bins, seed=args.seed
    )
    if args.output:
        serialize.write_cdf_csv(args.output, cdf)
        print(f"wrote {args.output}: {len(cdf.xs)} grid points")
    print(
        f"sup deviation = {deviation:.6f} "
        f"(samples {args.samples}, depth {args.depth}, seed {args.seed})"
    )
    return 0


def _render_csv(args):
    header, rows = serialize.read_csv_table(args.input)
    title = args.title if args.title is not None else os.path.basename(args.input)
    if not rows:
        return svgplot.frame_svg(title=title)
    color = args.color
    if color is None and "branch" in header:
        color = "branch"
    labels = None
    if color and color != "none":
        if color not in header:
            raise BadCSV(f"{args.input}: no column {color!r} to color by")
        k = header.index(color)
        labels = [row[k] for row in rows]
    try:
        xs = [float(row[0]) for row in rows]
        ys = [float(row[1]) for row in rows]
    except ValueError as exc:
        raise BadCSV(f"{args.input}: non-numeric coordinates: {exc}") from None
    return svgplot.scatter_svg(xs, ys, labels=labels, title=title)


def cmd_render(args):
    if args.input.endswith(".json"):
        _, grid, _ = serialize.load_attractor(args.input)
        title = args.title if args.title is not None else os.path.basename(args.input)
        text = svgplot.grid_svg(grid, title=title)
    else:
        text = _render_csv(args)
    out = args.output
    if out is None:
        out = os.path.splitext(args.input)[0] + ".svg"
    svgplot.save_svg(out, text)
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _system_opts(p):
    p.add_argument(
        "--system",
        required=True,
        metavar="NAME|FILE.json",
        help=f"builtin ({', '.join(BUILTIN_NAMES)}) or system JSON path",
    )
    p.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="system parameter (repeatable), e.g. alpha=0.4",
    )


def build_parser():
    parser = _Parser(
        prog="cfx",
        description="Continued-fraction systems: orbits, planar attractors, "
        "invariant densities, and verification checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="iterate a skew/dual/raw/complex orbit to CSV")
    _system_opts(p)
    p.add_argument("--form", choices=("skew", "dual", "raw", "hurwitz"))
    p.add_argument("--start", metavar="X[,Y]")
    p.add_argument("--points", type=int, default=20000)
    p.add_argument("--burn", type=int, default=100)
    p.add_argument("-o", "--output", default="orbit.csv")
    p.set_defaults(fn=cmd_orbit)

    p = sub.add_parser("attract", help="run the set-map iteration to a JSON dump")
    _system_opts(p)
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--truncation", type=int, help="branch enumeration level")
    p.add_argument("-o", "--output", default="attractor.json")
    p.set_defaults(fn=cmd_attract)

    p = sub.add_parser("density", help="normalized density profile of a dump")
    p.add_argument("--input", required=True, metavar="ATTRACTOR.json")
    p.add_argument("-o", "--output", default="density.csv")
    p.set_defaults(fn=cmd_density)

    p = sub.add_parser("verify", help="run one verification check")
    _system_opts(p)
    p.add_argument("--check", required=True, choices=CHECKS)
    p.add_argument("--input", metavar="ATTRACTOR.json", help="reuse a dump")
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--truncation", type=int)
    p.add_argument("--points", type=int, default=10000)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("gauss-kuzmin", help="iterated fractional-inverse statistics")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_gauss_kuzmin)

    p = sub.add_parser("render", help="render a CSV/JSON artifact to SVG")
    p.add_argument("--input", required=True, metavar="FILE.csv|FILE.json")
    p.add_argument("--color", metavar="COLUMN|none")
    p.add_argument("--title")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_render)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (StructuralRefusal, ZeroMass, NoTailBound) as exc:
        print(f"cfx {args.command}: {exc}", file=sys.stderr)
        return 2
    except (BadParameter, BadInput, BadCSV, GridMismatch) as exc:
        print(f"cfx {args.command}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"cfx {args.command}: {exc}", file=sys.stderr)
        return 3
    except (NoConvergence, OrbitEscapes) as exc:
        print(f"cfx {args.command}: {exc}", file=sys.stderr)
        return 1
    except CfxError as exc:
        print(f"cfx {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
