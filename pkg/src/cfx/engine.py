"""Set-map attractor engine.

The planar invariant set is represented on a uniform grid over the base
interval: one fiber (a finite union of closed y-intervals) per cell,
evaluated at the cell midpoint.  One application of the set map pulls every
target cell back through each branch whose image covers the cell midpoint;
since the branch geometry never changes between iterations, it is
precomputed once into a flat pullback table (CSR by target cell) holding
the affine fiber action slope = det*(cx+d)^2 and offset = -det*c*(cx+d) at
the exact preimage of the midpoint.  The per-iteration work (map, sort,
merge) runs in the kernel backend.

Iteration starts from the single-point fibers {0} and stops under a Banach
certificate when the contraction bound k is strictly below 1, or under an
empirical geometric-decay certificate when k = 1 (weakly expanding
systems, where the squared map contracts but the iterated map does not).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import BACKEND, theta_merge
from .errors import (
    BadParameter,
    EmptyFiber,
    GridMismatch,
    NoConvergence,
    NoTailBound,
    OutOfDomain,
    StructuralRefusal,
)
from .fibers import FiberSet, hausdorff_distance, merge_pairs
from .mobius import PiecewiseSystem, branch_arrays, validate

__all__ = [
    "AttractorGrid",
    "PullbackTable",
    "ConvergenceReport",
    "worker_count",
    "truncation_level",
    "theta_step",
    "sup_distance",
    "fixed_point",
    "invariance_residual",
    "reference_residual",
    "reference_grid",
    "image_overlap",
    "surjectivity_defect",
]

_EDGE = 1e-12


def worker_count():
    """Parallel worker cap: min(cpu count, CFX_THREADS when set and valid)."""
    n = os.cpu_count() or 1
    cap = os.environ.get("CFX_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


class AttractorGrid:
    """Uniform grid of fibers over [lo, hi] in CSR layout."""

    __slots__ = ("lo", "hi", "start", "flo", "fhi")

    def __init__(self, lo, hi, start, flo, fhi):
        self.lo = float(lo)
        self.hi = float(hi)
        self.start = start
        self.flo = flo
        self.fhi = fhi

    @property
    def n_cells(self):
        return len(self.start) - 1

    @property
    def h(self):
        return (self.hi - self.lo) / self.n_cells

    def midpoints(self):
        n = self.n_cells
        return self.lo + (np.arange(n) + 0.5) * ((self.hi - self.lo) / n)

    @classmethod
    def seeded(cls, interval, n_cells, value=0.0):
        """Every fiber is the single point {value}."""
        if n_cells < 1:
            raise BadParameter(f"need at least one cell, got {n_cells}")
        lo, hi = interval
        start = np.arange(n_cells + 1, dtype=np.int64)
        pts = np.full(n_cells, float(value))
        return cls(lo, hi, start, pts, pts.copy())

    @classmethod
    def from_fibers(cls, interval, fibers):
        """Build from an iterable of FiberSet (or (lo,hi) pair lists)."""
        lows, highs, start = [], [], [0]
        for fib in fibers:
            pairs = fib.intervals if isinstance(fib, FiberSet) else tuple(fib)
            for a, b in pairs:
                lows.append(a)
                highs.append(b)
            start.append(len(lows))
        return cls(
            interval[0],
            interval[1],
            np.asarray(start, dtype=np.int64),
            np.asarray(lows, dtype=float),
            np.asarray(highs, dtype=float),
        )

    @classmethod
    def from_reference(cls, interval, n_cells, fiber_low, fiber_high):
        """Single-interval fibers [fiber_low(x), fiber_high(x)] at midpoints."""
        lo, hi = float(interval[0]), float(interval[1])
        h = (hi - lo) / n_cells
        lows = np.empty(n_cells)
        highs = np.empty(n_cells)
        for j in range(n_cells):
            x = lo + (j + 0.5) * h
            lows[j], highs[j] = fiber_low(x), fiber_high(x)
            if highs[j] < lows[j]:
                raise BadParameter(f"inverted reference fiber at x={x}")
        start = np.arange(n_cells + 1, dtype=np.int64)
        return cls(lo, hi, start, lows, highs)

    def cell_of(self, x):
        span = self.hi - self.lo
        tol = _EDGE * max(1.0, abs(self.lo), abs(self.hi))
        if not self.lo - tol <= x <= self.hi + tol:
            raise OutOfDomain(f"{x} outside grid interval [{self.lo}, {self.hi}]")
        j = int((x - self.lo) / span * self.n_cells)
        return min(max(j, 0), self.n_cells - 1)

    def fiber(self, j):
        a, b = int(self.start[j]), int(self.start[j + 1])
        return FiberSet._wrap(list(zip(self.flo[a:b].tolist(), self.fhi[a:b].tolist())))

    def fiber_at(self, x):
        return self.fiber(self.cell_of(x))

    def fiber_lengths(self):
        """Total fiber length per cell."""
        seg = self.fhi - self.flo
        out = np.add.reduceat(np.append(seg, 0.0), self.start[:-1])
        out[np.diff(self.start) == 0] = 0.0
        return out

    def total_mass(self):
        """Plane measure: sum of fiber lengths times the cell width."""
        return float(self.fiber_lengths().sum() * self.h)

    def bounds(self):
        """Bounding y-interval over all fibers."""
        if len(self.flo) == 0:
            return (0.0, 0.0)
        return float(self.flo.min()), float(self.fhi.max())


def _same_geometry(k1, k2):
    tol = _EDGE * max(1.0, abs(k1.lo), abs(k1.hi))
    return (
        k1.n_cells == k2.n_cells
        and abs(k1.lo - k2.lo) <= tol
        and abs(k1.hi - k2.hi) <= tol
    )


def _point_fiber_dist(pkey, pval, pcell, bkl, bol, boh, bcell):
    """Distance from each point to the interval union in its own cell.

    ``bkl`` are cell-offset keys of interval left endpoints (globally
    sorted), ``bol``/``boh`` the original endpoints; distances use the
    originals so the key shift costs no precision.
    """
    n = bkl.size
    if n == 0:
        return np.full(pkey.size, math.inf)
    i = np.searchsorted(bkl, pkey, side="right") - 1
    iv = np.clip(i, 0, n - 1)
    same = (i >= 0) & (bcell[iv] == pcell)
    inside = same & (pval <= boh[iv])
    dr = np.where(same, np.maximum(pval - boh[iv], 0.0), math.inf)
    jv = np.clip(i + 1, 0, n - 1)
    same_r = (i + 1 < n) & (bcell[jv] == pcell)
    dl = np.where(same_r, bol[jv] - pval, math.inf)
    d = np.minimum(dr, dl)
    d[inside] = 0.0
    return d


def _one_sided_sup(a, b):
    """Sup over cells of sup_{x in A_j} d(x, B_j), CSR triples in/out."""
    (akl, aol, aoh, acell), (bkl, bol, boh, bcell) = a, b
    if aol.size == 0:
        return 0.0
    pkey = np.concatenate([akl, akl + (aoh - aol)])
    pval = np.concatenate([aol, aoh])
    pcell = np.concatenate([acell, acell])
    best = float(_point_fiber_dist(pkey, pval, pcell, bkl, bol, boh, bcell).max())
    if bol.size > 1:
        adj = bcell[1:] == bcell[:-1]
        if adj.any():
            half = 0.5 * (bol[1:][adj] - boh[:-1][adj])
            gval = boh[:-1][adj] + half
            gkey = bkl[1:][adj] - half
            gcell = bcell[1:][adj]
            i = np.searchsorted(akl, gkey, side="right") - 1
            iv = np.clip(i, 0, akl.size - 1)
            inside = (i >= 0) & (acell[iv] == gcell) & (gval <= aoh[iv])
            if inside.any():
                best = max(best, float(half[inside].max()))
    return best


def _csr_keyed(grid, base):
    cells = np.repeat(np.arange(grid.n_cells), np.diff(grid.start))
    shift = cells * base
    return grid.flo + shift, grid.flo, grid.fhi, cells


def sup_distance(k1, k2):
    """Sup over cells of the Hausdorff distance between matching fibers.

    Exact: per cell the distance is attained either at an interval
    endpoint of one fiber or at a gap midpoint of one fiber that lies
    inside the other.  A per-cell offset keeps one global sorted key
    array so every cell is handled in the same vector pass.
    """
    if not _same_geometry(k1, k2):
        raise GridMismatch(
            f"grids differ: {k1.n_cells} cells on [{k1.lo}, {k1.hi}] vs "
            f"{k2.n_cells} on [{k2.lo}, {k2.hi}]"
        )
    if k1.flo.size == 0 and k2.flo.size == 0:
        return 0.0
    vals = [v for g in (k1, k2) for v in (g.flo, g.fhi) if v.size]
    span = max(float(v.max()) for v in vals) - min(float(v.min()) for v in vals)
    base = 2.0 * span + 1.0
    a = _csr_keyed(k1, base)
    b = _csr_keyed(k2, base)
    return max(_one_sided_sup(a, b), _one_sided_sup(b, a))


def truncation_level(system, eps):
    """Least enumeration level whose declared tail bound is <= eps."""
    if not eps > 0.0:
        raise BadParameter(f"tolerance must be positive, got {eps}")
    if system.is_finite:
        return len(system.branches())
    tail = system.family.tail_fn
    if tail is None:
        raise NoTailBound(f"{system!r} declares no truncation tail bound")
    cap = system.family.max_level
    if tail(1) <= eps:
        return 1
    level = 1
    while tail(level) > eps:
        level *= 2
        if level >= cap:
            if tail(cap) <= eps:
                level = cap
                break
            raise NoTailBound(
                f"tail bound cannot reach {eps} within the level cap {cap}"
            )
    lo_, hi_ = level // 2, level
    while lo_ + 1 < hi_:
        mid = (lo_ + hi_) // 2
        if tail(mid) <= eps:
            hi_ = mid
        else:
            lo_ = mid
    return hi_


@dataclass(frozen=True)
class PullbackTable:
    """Branch pullback geometry, CSR by target cell.

    Row r of target cell j says: gather the fiber of source cell src[r] and
    map it through y -> slope[r]*y + offset[r].
    """

    lo: float
    hi: float
    n_cells: int
    level: int
    n_branches: int
    row_start: np.ndarray
    src: np.ndarray
    slope: np.ndarray
    offset: np.ndarray

    @classmethod
    def build(cls, system, lo, hi, n_cells, level=None):
        span = hi - lo
        h = span / n_cells
        mids = lo + (np.arange(n_cells) + 0.5) * h
        arrs = branch_arrays(system, level)
        edge = _EDGE * max(1.0, abs(lo), abs(hi))
        a, b, c, d = arrs["a"], arrs["b"], arrs["c"], arrs["d"]
        det, blo, bhi = arrs["det"], arrs["lo"], arrs["hi"]
        img_lo, img_hi = arrs["img_lo"], arrs["img_hi"]
        tgt_parts, src_parts, slope_parts, off_parts = [], [], [], []
        for i in range(len(a)):
            ja = int(np.searchsorted(mids, img_lo[i] - edge, "left"))
            jb = int(np.searchsorted(mids, img_hi[i] + edge, "right"))
            if jb <= ja:
                continue
            xm = mids[ja:jb]
            xs = (d[i] * xm - b[i]) / (a[i] - c[i] * xm)
            np.clip(xs, blo[i], bhi[i], out=xs)
            q = c[i] * xs + d[i]
            slope_parts.append(det[i] * (q * q))
            off_parts.append(-det[i] * c[i] * q)
            cells = np.floor((xs - lo) / h).astype(np.int64)
            np.clip(cells, 0, n_cells - 1, out=cells)
            src_parts.append(cells.astype(np.int32))
            tgt_parts.append(np.arange(ja, jb, dtype=np.int64))
        if not tgt_parts:
            raise EmptyFiber("no branch image meets any grid cell")
        tgt = np.concatenate(tgt_parts)
        counts = np.bincount(tgt, minlength=n_cells)
        if (counts == 0).any():
            j = int(np.flatnonzero(counts == 0)[0])
            raise EmptyFiber(
                f"no branch image covers cell {j} (x = {mids[j]:.6g}); "
                "raise the truncation level or fix the branch images"
            )
        order = np.argsort(tgt, kind="stable")
        row_start = np.zeros(n_cells + 1, dtype=np.int64)
        np.cumsum(counts, out=row_start[1:])
        return cls(
            lo=float(lo),
            hi=float(hi),
            n_cells=n_cells,
            level=int(level if level is not None else 0),
            n_branches=len(a),
            row_start=row_start,
            src=np.concatenate(src_parts)[order],
            slope=np.concatenate(slope_parts)[order],
            offset=np.concatenate(off_parts)[order],
        )


_TABLE_CACHE = {}
_TABLE_CACHE_CAP = 8


def _get_table(system, grid, level):
    key = (system.key, grid.n_cells, grid.lo, grid.hi, level)
    table = _TABLE_CACHE.get(key)
    if table is None:
        table = PullbackTable.build(system, grid.lo, grid.hi, grid.n_cells, level)
        if len(_TABLE_CACHE) >= _TABLE_CACHE_CAP:
            _TABLE_CACHE.pop(next(iter(_TABLE_CACHE)))
        _TABLE_CACHE[key] = table
    return table


def _run_kernel(table, grid, eps, workers):
    n = table.n_cells
    args = (
        table.row_start,
        table.src,
        table.slope,
        table.offset,
        grid.start,
        grid.flo,
        grid.fhi,
    )
    w = workers if workers is not None else worker_count()
    if BACKEND == "c" and w > 1 and n >= 4 * w:
        bounds = np.linspace(0, n, w + 1).astype(int)
        chunks = [(int(bounds[i]), int(bounds[i + 1])) for i in range(w)]
        with ThreadPoolExecutor(max_workers=w) as pool:
            parts = list(
                pool.map(lambda jj: theta_merge(*args, jj[0], jj[1], eps), chunks)
            )
        counts = np.concatenate([p[0] for p in parts])
        lows = np.concatenate([p[1] for p in parts])
        highs = np.concatenate([p[2] for p in parts])
    else:
        counts, lows, highs = theta_merge(*args, 0, n, eps)
    return counts, lows, highs


def _cap_pieces(start, lows, highs, cap):
    """Bound per-fiber interval counts by filling the smallest gaps.

    Filling a gap replaces two intervals by their hull, a superset; the
    set-map iteration flushes the transient extra mass, so capping only
    bounds complexity (it binds while a point seed is still coalescing).
    Returns (start, lows, highs, capped_flag).
    """
    counts = np.diff(start)
    if (counts <= cap).all():
        return start, lows, highs, False
    parts_lo, parts_hi, new_counts = [], [], []
    for j in range(len(counts)):
        a, b = int(start[j]), int(start[j + 1])
        lo = lows[a:b]
        hi = highs[a:b]
        k = b - a
        if k > cap:
            gaps = lo[1:] - hi[:-1]
            drop = np.argsort(gaps, kind="stable")[: k - cap]
            keep = np.ones(k - 1, dtype=bool)
            keep[drop] = False
            first = np.concatenate(([0], np.flatnonzero(keep) + 1))
            last = np.concatenate((np.flatnonzero(keep), [k - 1]))
            lo = lo[first]
            hi = hi[last]
        parts_lo.append(lo)
        parts_hi.append(hi)
        new_counts.append(len(lo))
    start = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(new_counts, out=start[1:])
    return start, np.concatenate(parts_lo), np.concatenate(parts_hi), True


def theta_step(
    system,
    grid,
    level=None,
    table=None,
    eps_merge=None,
    workers=None,
    max_pieces=None,
):
    """One application of the truncated set map on the fiber grid.

    level is the family truncation level (ignored for finite systems);
    eps_merge defaults to h/10.  max_pieces caps the per-fiber interval
    count (smallest gaps filled first).  Raises EmptyFiber when a target
    cell receives no image.
    """
    if not system.is_finite and level is None and table is None:
        raise BadParameter("family systems need a truncation level")
    if table is None:
        table = _get_table(system, grid, None if system.is_finite else int(level))
    eps = grid.h / 10.0 if eps_merge is None else float(eps_merge)
    counts, lows, highs = _run_kernel(table, grid, eps, workers)
    if (counts == 0).any():
        j = int(np.flatnonzero(counts == 0)[0])
        x = grid.lo + (j + 0.5) * grid.h
        raise EmptyFiber(f"empty image fiber in cell {j} (x = {x:.6g})")
    start = np.zeros(table.n_cells + 1, dtype=np.int64)
    np.cumsum(counts, out=start[1:])
    if max_pieces is not None:
        start, lows, highs, _ = _cap_pieces(start, lows, highs, int(max_pieces))
    return AttractorGrid(grid.lo, grid.hi, start, lows, highs)


@dataclass(frozen=True)
class ConvergenceReport:
    """Stopping certificate for the set-map iteration."""

    iterations: int
    final_distance: float
    k: float
    N: int
    tol: float
    weakly_expanding: bool
    certified: bool
    capped: bool
    distances: tuple

    def summary(self):
        return {
            "iterations": self.iterations,
            "final_distance": self.final_distance,
            "k": self.k,
            "N": self.N,
        }


def fixed_point(
    system,
    n_cells=1024,
    tol=1e-3,
    max_iter=200,
    level=None,
    workers=None,
    max_pieces=64,
):
    """Iterate the set map to its fixed point.

    Returns (grid, report).  Refuses systems with an indifferent
    (derivative +1) fixed point: their invariant measure is infinite and no
    compact planar set attracts.  Raises NoConvergence when the stopping
    rule is not met within max_iter.  max_pieces bounds the per-fiber
    interval count while the point seed coalesces; the bound starts at 8
    and doubles only when it is still active once progress stalls or the
    stopping rule fires.  report.capped records whether the bound was
    active at the last step (then necessarily max_pieces itself).
    """
    if not isinstance(system, PiecewiseSystem):
        raise StructuralRefusal(
            f"{type(system).__name__} has no branch matrices; the set-map "
            "engine applies only to piecewise homographic interval systems"
        )
    diag = validate(system)
    if diag.parabolic:
        label, x = diag.parabolic[0]
        raise StructuralRefusal(
            f"no compact invariant set (indifferent fixed point of branch "
            f"{label!r} at x = {x:g}); the invariant measure is infinite"
        )
    lo, hi = system.interval
    h = (hi - lo) / n_cells
    if tol < h:
        raise BadParameter(
            f"tol = {tol} is below the grid resolution h = {h:.3g}; "
            "refine the grid or relax the tolerance"
        )
    if system.is_finite:
        lvl = None
        n_report = len(system.branches())
    else:
        lvl = int(level) if level is not None else truncation_level(system, tol / 2.0)
        n_report = lvl
    grid = AttractorGrid.seeded((lo, hi), n_cells)
    table = _get_table(system, grid, lvl)
    k = diag.k
    weak = diag.weakly_expanding
    distances = []
    capped = False
    cap = min(8, max_pieces)
    for it in range(1, max_iter + 1):
        nxt = theta_step(system, grid, table=table, workers=workers)
        if cap is not None:
            s2, l2, h2, capped = _cap_pieces(nxt.start, nxt.flo, nxt.fhi, cap)
            if capped:
                nxt = AttractorGrid(nxt.lo, nxt.hi, s2, l2, h2)
        else:
            capped = False
        d = sup_distance(grid, nxt)
        distances.append(d)
        grid = nxt
        stalled = len(distances) >= 2 and d > 0.95 * distances[-2]
        if capped and cap < max_pieces and stalled:
            cap = min(cap * 2, max_pieces)
            continue
        if weak:
            if d == 0.0:
                done, certified = True, True
            elif d <= tol and len(distances) >= 5 and all(
                v <= tol for v in distances[-5:]
            ):
                window = distances[-5:]
                ratios = [
                    window[i + 1] / window[i]
                    for i in range(4)
                    if window[i] > 0.0
                ]
                decay = bool(ratios) and max(ratios) <= 0.95
                done, certified = (decay or d <= tol * 1e-3), decay
            else:
                done, certified = False, False
        else:
            done, certified = d <= tol * (1.0 - k), True
        if done and capped:
            # the piece bound was active at the stopping step: loosen it
            # and keep going (dropping it entirely once max_pieces was hit),
            # so the returned grid is a fixed point of the uncapped merge
            cap = min(cap * 2, max_pieces) if cap < max_pieces else None
            continue
        if done:
            return grid, ConvergenceReport(
                iterations=it,
                final_distance=d,
                k=k,
                N=n_report,
                tol=tol,
                weakly_expanding=weak,
                certified=certified,
                capped=capped,
                distances=tuple(distances),
            )
    raise NoConvergence(
        f"no convergence in {max_iter} iterations "
        f"(last distances {[f'{v:.3g}' for v in distances[-3:]]})"
    )


def invariance_residual(system, grid, level=None):
    """sup-Hausdorff distance between the grid and its set-map image."""
    if not system.is_finite and level is None:
        level = truncation_level(system, grid.h / 2.0)
    return sup_distance(grid, theta_step(system, grid, level=level))


def reference_grid(system, fiber_low, fiber_high, n_cells, xlo=None, xhi=None):
    """Grid holding closed-form fibers [fiber_low(x), fiber_high(x)]."""
    lo, hi = system.interval
    return AttractorGrid.from_reference(
        (lo if xlo is None else xlo, hi if xhi is None else xhi),
        n_cells,
        fiber_low,
        fiber_high,
    )


def reference_residual(system, fiber_low, fiber_high, n_cells, xlo=None, xhi=None, level=None):
    """Invariance defect of closed-form fibers, evaluated at exact preimages.

    Unlike the grid path, source fibers are read from the closed form at the
    exact branch preimage of each cell midpoint (no cell lookup), so the
    residual measures the sheet itself plus truncation, not discretization.
    Useful on restricted windows (infinite-measure systems near an
    indifferent point) where preimages fall outside the window.
    """
    lo, hi = system.interval
    xlo = lo if xlo is None else xlo
    xhi = hi if xhi is None else xhi
    branches = system.branches(level)
    scale = max(1.0, abs(lo), abs(hi))
    h = (xhi - xlo) / n_cells
    worst = 0.0
    for j in range(n_cells):
        x = xlo + (j + 0.5) * h
        pieces = []
        for br in branches:
            ilo, ihi = br.image()
            if not ilo - _EDGE * scale <= x <= ihi + _EDGE * scale:
                continue
            src = br.inverse(x, checked=False)
            src = min(max(src, br.lo), br.hi)
            q = br.c * src + br.d
            s = br.det * q * q
            t = -br.det * br.c * q
            e1 = s * fiber_low(src) + t
            e2 = s * fiber_high(src) + t
            pieces.append((e1, e2) if e1 <= e2 else (e2, e1))
        if not pieces:
            raise EmptyFiber(f"no branch image covers x = {x:.6g}")
        image = FiberSet._wrap(merge_pairs(pieces, 1e-9 * scale))
        target = FiberSet._wrap([(fiber_low(x), fiber_high(x))])
        d = hausdorff_distance(image, target)
        if d > worst:
            worst = d
    return worst


def _event_sweep(img_lo, img_hi, img_cell, own_lo, own_hi, own_cell):
    """One overlap/defect sweep over interval events grouped by cell.

    Returns (overlap_len, defect_len): total pairwise-double-covered image
    length and total own length not covered by any image interval.
    """
    total = img_lo.size
    k = own_lo.size
    pos = np.concatenate([img_lo, img_hi, own_lo, own_hi])
    d_img = np.concatenate(
        [
            np.ones(total, dtype=np.int64),
            -np.ones(total, dtype=np.int64),
            np.zeros(2 * k, dtype=np.int64),
        ]
    )
    d_own = np.concatenate(
        [
            np.zeros(2 * total, dtype=np.int64),
            np.ones(k, dtype=np.int64),
            -np.ones(k, dtype=np.int64),
        ]
    )
    cell = np.concatenate([img_cell, img_cell, own_cell, own_cell])
    order = np.lexsort((d_img + d_own, pos, cell))
    pos = pos[order]
    cell = cell[order]
    c_img = np.cumsum(d_img[order])
    c_own = np.cumsum(d_own[order])
    gap = np.diff(pos)
    gap = np.where(cell[1:] == cell[:-1], gap, 0.0)
    ci = c_img[:-1]
    overlap = float((gap * (ci * (ci - 1) // 2)).sum())
    defect = float((gap * ((c_own[:-1] >= 1) & (ci == 0))).sum())
    return overlap, defect


def _raw_image_sweep(system, grid, level):
    """Event sweep of every unmerged branch image against the grid fibers.

    Expands the pullback table without merging; the overlap figure is the
    genuine pairwise double cover of branch images.  The defect figure from
    this sweep counts sub-resolution tiling gaps and is not used.
    """
    table = _get_table(system, grid, None if system.is_finite else int(level))
    n = grid.n_cells
    overlap = 0.0
    defect = 0.0
    # chunk by expanded event count (rows weighted by source piece counts),
    # not by raw rows, so memory stays bounded on piece-heavy grids
    pieces = np.append(np.diff(grid.start)[table.src], 0)
    exp_cell = np.add.reduceat(pieces, table.row_start[:-1])
    exp_cell[np.diff(table.row_start) == 0] = 0
    csum = np.concatenate(([0], np.cumsum(exp_cell)))
    budget = 1_000_000
    j0 = 0
    while j0 < n:
        j1 = int(np.searchsorted(csum, csum[j0] + budget, side="right")) - 1
        j1 = min(max(j1, j0 + 1), n)
        r0, r1 = int(table.row_start[j0]), int(table.row_start[j1])
        rs = table.src[r0:r1]
        cnt = grid.start[rs + 1] - grid.start[rs]
        total = int(cnt.sum())
        if total == 0:
            j0 = j1
            continue
        out_pos = np.cumsum(cnt) - cnt
        inner = np.arange(total, dtype=np.int64) - np.repeat(out_pos, cnt)
        fidx = np.repeat(grid.start[rs], cnt) + inner
        s = np.repeat(table.slope[r0:r1], cnt)
        t = np.repeat(table.offset[r0:r1], cnt)
        e1 = s * grid.flo[fidx] + t
        e2 = s * grid.fhi[fidx] + t
        img_lo = np.minimum(e1, e2)
        img_hi = np.maximum(e1, e2)
        rows_per_cell = np.diff(table.row_start[j0 : j1 + 1])
        img_cell = np.repeat(
            np.repeat(np.arange(j0, j1, dtype=np.int64), rows_per_cell), cnt
        )
        k0, k1 = int(grid.start[j0]), int(grid.start[j1])
        own_cell = np.repeat(
            np.arange(j0, j1, dtype=np.int64), np.diff(grid.start[j0 : j1 + 1])
        )
        ov, df = _event_sweep(
            img_lo, img_hi, img_cell, grid.flo[k0:k1], grid.fhi[k0:k1], own_cell
        )
        overlap += ov
        defect += df
        j0 = j1
    return overlap * grid.h, defect * grid.h


def image_overlap(system, grid, level=None):
    """Plane measure of pairwise overlaps among branch images of the grid."""
    if not system.is_finite and level is None:
        level = truncation_level(system, grid.h / 2.0)
    return _raw_image_sweep(system, grid, level)[0]


def surjectivity_defect(system, grid, level=None):
    """Plane measure of the grid not covered by its eps-merged image.

    The image union is taken after the kernel's h/10 merge (one set-map
    step), so tiling seams below the engine's own resolution do not count
    as uncovered area; what remains is genuine geometric defect.
    """
    if not system.is_finite and level is None:
        level = truncation_level(system, grid.h / 2.0)
    image = theta_step(system, grid, level=level)
    cells = np.arange(grid.n_cells)
    img_cell = np.repeat(cells, np.diff(image.start))
    own_cell = np.repeat(cells, np.diff(grid.start))
    _, defect = _event_sweep(
        image.flo, image.fhi, img_cell, grid.flo, grid.fhi, own_cell
    )
    return defect * grid.h
