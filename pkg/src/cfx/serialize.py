"""File formats: JSON with exact float round-trip, and CSV tables.

All floats are written with 17 significant digits (printf %.17g), which
reproduces the double exactly on reload.  The stdlib json encoder offers
no control over float formatting, so the writer here is hand-rolled; the
reader is plain json.loads.

Attractor files hold {"system", "n_cells", "fibers", "report"}: the system
in its compact builtin form (name + parameters) or as explicit normalized
branch matrices, and one [low, high] interval list per grid cell.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .catalog import BUILTIN_NAMES, make_system
from .errors import BadCSV, BadInput
from .mobius import PiecewiseSystem, normalize_branch

__all__ = [
    "dumps",
    "loads",
    "write_json",
    "read_json",
    "system_to_obj",
    "system_from_obj",
    "attractor_to_obj",
    "attractor_from_obj",
    "save_attractor",
    "load_attractor",
    "write_orbit_csv",
    "write_density_csv",
    "write_cdf_csv",
    "read_csv_table",
]


def _fmt_float(x):
    if not math.isfinite(x):
        raise BadInput(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def _leaf(o):
    if isinstance(o, bool):
        return "true" if o else "false"
    if o is None:
        return "null"
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        return _fmt_float(float(o))
    if isinstance(o, str):
        return json.dumps(o)
    return None


def _is_inline(o):
    """Scalars, flat scalar lists, and lists of flat scalar lists inline."""
    if _leaf(o) is not None:
        return True
    if isinstance(o, (list, tuple)):
        return all(
            _leaf(v) is not None
            or (
                isinstance(v, (list, tuple))
                and all(_leaf(u) is not None for u in v)
            )
            for v in o
        )
    return False


def _emit(o, pad):
    leaf = _leaf(o)
    if leaf is not None:
        return leaf
    if isinstance(o, np.ndarray):
        o = o.tolist()
    if isinstance(o, (list, tuple)):
        if not o:
            return "[]"
        if _is_inline(o):
            return "[" + ", ".join(_emit(v, pad) for v in o) + "]"
        inner = ",\n".join(pad + "  " + _emit(v, pad + "  ") for v in o)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(o, dict):
        if not o:
            return "{}"
        inner = ",\n".join(
            pad + "  " + json.dumps(str(k)) + ": " + _emit(v, pad + "  ")
            for k, v in o.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    raise BadInput(f"cannot serialize {type(o).__name__}")


def dumps(obj):
    return _emit(obj, "") + "\n"


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInput(f"bad JSON: {exc}") from None


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def read_json(path):
    with open(path) as fh:
        return loads(fh.read())


# ---------------------------------------------------------------------------
# systems


def system_to_obj(system, level=None):
    """Compact builtin form when available, else explicit branch matrices."""
    name = getattr(system, "name", None)
    if name in BUILTIN_NAMES:
        obj = {"builtin": name}
        params = dict(getattr(system, "params", None) or {})
        if params:
            obj["params"] = params
        return obj
    if not isinstance(system, PiecewiseSystem):
        raise BadInput(f"no file form for {type(system).__name__}")
    if not system.is_finite and level is None:
        raise BadInput(
            "custom family systems serialize only at an explicit branch level"
        )
    branches = [
        {
            "matrix": [br.a, br.b, br.c, br.d],
            "domain": [br.lo, br.hi],
            "label": br.label,
        }
        for br in system.branches(level)
    ]
    return {"interval": list(system.interval), "branches": branches}


def system_from_obj(obj):
    if not isinstance(obj, dict):
        raise BadInput(f"system object must be a mapping, got {type(obj).__name__}")
    if "builtin" in obj:
        return make_system(obj["builtin"], obj.get("params") or {})[0]
    try:
        interval = tuple(obj["interval"])
        branches = tuple(
            normalize_branch(
                *(float(v) for v in e["matrix"]),
                lo=float(e["domain"][0]),
                hi=float(e["domain"][1]),
                label=str(e["label"]),
            )
            for e in obj["branches"]
        )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise BadInput(f"malformed system object: {exc}") from None
    return PiecewiseSystem(interval, branches=branches, name="custom")


# ---------------------------------------------------------------------------
# attractors


def attractor_to_obj(system, grid, report=None):
    fibers = []
    for j in range(grid.n_cells):
        a, b = int(grid.start[j]), int(grid.start[j + 1])
        fibers.append(
            [[float(grid.flo[k]), float(grid.fhi[k])] for k in range(a, b)]
        )
    level = getattr(report, "N", None)
    if level is None and isinstance(report, dict):
        level = report.get("N")
    obj = {
        "system": system_to_obj(system, level=level),
        "n_cells": grid.n_cells,
        "fibers": fibers,
    }
    if report is not None:
        obj["report"] = report.summary() if hasattr(report, "summary") else dict(report)
    return obj


def attractor_from_obj(obj):
    from .engine import AttractorGrid

    try:
        system = system_from_obj(obj["system"])
        n_cells = int(obj["n_cells"])
        fibers = obj["fibers"]
    except (KeyError, TypeError) as exc:
        raise BadInput(f"malformed attractor object: {exc}") from None
    if len(fibers) != n_cells:
        raise BadInput(f"n_cells = {n_cells} but {len(fibers)} fibers present")
    grid = AttractorGrid.from_fibers(system.interval, fibers)
    return system, grid, obj.get("report")


def save_attractor(path, system, grid, report=None):
    write_json(path, attractor_to_obj(system, grid, report))


def load_attractor(path):
    return attractor_from_obj(read_json(path))


# ---------------------------------------------------------------------------
# CSV


def _write_rows(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_orbit_csv(path, cloud):
    """Orbit table: x,y,branch for interval forms; split complex pairs
    re_z,im_z,re_w,im_w,digit for the complex step."""
    pts, labels = cloud.points, cloud.labels
    if cloud.form == "hurwitz":
        header = ("re_z", "im_z", "re_w", "im_w", "digit")
        rows = (
            tuple(_fmt_float(v) for v in pts[i]) + (str(labels[i]),)
            for i in range(len(pts))
        )
    else:
        header = ("x", "y", "branch")
        rows = (
            (_fmt_float(pts[i, 0]), _fmt_float(pts[i, 1]), str(labels[i]))
            for i in range(len(pts))
        )
    _write_rows(path, header, rows)


def write_density_csv(path, profile):
    """Density table with header x,phi."""
    _write_rows(
        path,
        ("x", "phi"),
        (
            (_fmt_float(x), _fmt_float(p))
            for x, p in zip(profile.xs.tolist(), profile.ps.tolist())
        ),
    )


def write_cdf_csv(path, cdf):
    """Cumulative table with header x,P."""
    _write_rows(
        path,
        ("x", "P"),
        (
            (_fmt_float(x), _fmt_float(p))
            for x, p in zip(cdf.xs.tolist(), cdf.ps.tolist())
        ),
    )


def read_csv_table(path, expect_header=None):
    """Read a homogeneous CSV table; returns (header, list of row tuples).

    Raises BadCSV on ragged rows, an empty file, or a header mismatch.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise BadCSV(f"{path}: empty file") from None
        if expect_header is not None and header != tuple(expect_header):
            raise BadCSV(
                f"{path}: header {header} does not match expected {tuple(expect_header)}"
            )
        rows = []
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise BadCSV(f"{path}: line {i} has {len(row)} fields, not {len(header)}")
            rows.append(tuple(row))
    return header, rows
