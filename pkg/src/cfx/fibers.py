"""Finite unions of closed intervals and the sup-Hausdorff machinery.

A fiber is stored as a sorted tuple of disjoint closed intervals
``[(lo, hi), ...]``; degenerate intervals with lo == hi are allowed (the
set-map iteration is seeded with single points).  All distances here are the
ordinary point-to-set distance on the line and the Hausdorff metric built
from it.
"""

from __future__ import annotations

import math
from bisect import bisect_right

from .errors import BadInput, EmptySet

__all__ = [
    "FiberSet",
    "merge_pairs",
    "fatten",
    "one_sided_gap",
    "hausdorff_distance",
    "intersection_length",
]


def merge_pairs(pairs, eps=0.0):
    """Sort interval pairs and merge any two closer than *eps*.

    Returns a list of (lo, hi) tuples that is sorted, with every gap
    strictly larger than eps.  Input pairs may overlap, touch, or be
    unsorted; each pair must satisfy lo <= hi.
    """
    if eps < 0.0:
        raise BadInput(f"negative merge tolerance {eps}")
    items = sorted(pairs)
    out = []
    for lo, hi in items:
        if hi < lo:
            raise BadInput(f"inverted interval [{lo}, {hi}]")
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise BadInput(f"non-finite interval [{lo}, {hi}]")
        if out and lo <= out[-1][1] + eps:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


class FiberSet:
    """A finite union of disjoint closed intervals on the line."""

    __slots__ = ("intervals",)

    def __init__(self, pairs=(), merge_eps=0.0):
        self.intervals = tuple(merge_pairs(pairs, merge_eps))

    @classmethod
    def _wrap(cls, canonical):
        obj = cls.__new__(cls)
        obj.intervals = tuple(canonical)
        return obj

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __eq__(self, other):
        return isinstance(other, FiberSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        inner = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in self.intervals)
        return f"FiberSet({{{inner}}})"

    @property
    def is_empty(self):
        return not self.intervals

    @property
    def length(self):
        """Total Lebesgue measure of the union."""
        return sum(hi - lo for lo, hi in self.intervals)

    @property
    def hull(self):
        """Smallest closed interval containing the set."""
        if not self.intervals:
            raise EmptySet("empty fiber has no hull")
        return self.intervals[0][0], self.intervals[-1][1]

    def contains(self, y, tol=0.0):
        for lo, hi in self.intervals:
            if lo - tol <= y <= hi + tol:
                return True
        return False

    def distance_to(self, y):
        """Distance from the point *y* to the union."""
        if not self.intervals:
            raise EmptySet("distance to empty fiber")
        los = [lo for lo, _ in self.intervals]
        i = bisect_right(los, y)
        best = math.inf
        if i > 0:
            lo, hi = self.intervals[i - 1]
            best = 0.0 if y <= hi else y - hi
        if i < len(self.intervals) and best > 0.0:
            best = min(best, self.intervals[i][0] - y)
        return best

    def map_affine(self, s, t):
        """Image under y -> s*y + t (endpoints swap when s < 0)."""
        pairs = []
        for lo, hi in self.intervals:
            e1 = s * lo + t
            e2 = s * hi + t
            pairs.append((e1, e2) if e1 <= e2 else (e2, e1))
        if s < 0:
            pairs.reverse()
        return FiberSet._wrap(pairs)

    def union(self, other, eps=0.0):
        return FiberSet(list(self.intervals) + list(other.intervals), eps)


def fatten(fiber, eps):
    """Closed eps-neighborhood of the fiber (gaps <= 2*eps close up)."""
    if eps < 0.0:
        raise BadInput(f"negative fattening radius {eps}")
    if fiber.is_empty:
        return fiber
    return FiberSet._wrap(merge_pairs([(lo - eps, hi + eps) for lo, hi in fiber.intervals]))


def one_sided_gap(a, b):
    """sup over y in *a* of dist(y, *b*); 0.0 when *a* is empty.

    The supremum over a union of intervals is attained either at an endpoint
    of *a* or at a midpoint of a gap of *b* that lies inside *a*, so the
    exact value comes from finitely many candidates.
    """
    if b.is_empty:
        raise EmptySet("gap to empty fiber")
    if a.is_empty:
        return 0.0
    candidates = [p for lo, hi in a.intervals for p in (lo, hi)]
    bi = b.intervals
    for k in range(len(bi) - 1):
        mid = 0.5 * (bi[k][1] + bi[k + 1][0])
        if a.contains(mid, tol=1e-15):
            candidates.append(mid)
    return max(b.distance_to(y) for y in candidates)


def hausdorff_distance(a, b):
    """Hausdorff distance between two nonempty interval unions."""
    if a.is_empty or b.is_empty:
        raise EmptySet("Hausdorff distance needs nonempty fibers")
    return max(one_sided_gap(a, b), one_sided_gap(b, a))


def intersection_length(a, b):
    """Lebesgue measure of the intersection of two interval unions."""
    total = 0.0
    i = j = 0
    ai, bi = a.intervals, b.intervals
    while i < len(ai) and j < len(bi):
        lo = max(ai[i][0], bi[j][0])
        hi = min(ai[i][1], bi[j][1])
        if hi > lo:
            total += hi - lo
        if ai[i][1] < bi[j][1]:
            i += 1
        else:
            j += 1
    return total
