"""Piecewise homographic interval maps in normalized matrix form.

Each branch is an integer-determinant homography x -> (ax+b)/(cx+d)
restricted to a closed domain interval.  Matrices are rescaled so that
ad - bc = +-1 and the sign convention c > 0 (or c = 0, d > 0) makes the
representation unique.  A system is either a finite list of branches or a
countable family with closed-form digit lookup and a declared truncation
tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    BadParameter,
    NoBranch,
    NotExpanding,
    OutOfDomain,
    OutOfRange,
    PoleInDomain,
    UnboundedShift,
    ZeroDeterminant,
)

__all__ = [
    "MobiusBranch",
    "normalize_branch",
    "apply",
    "derivative",
    "inverse_apply",
    "BranchFamily",
    "PiecewiseSystem",
    "branch_at",
    "expansion_bound",
    "shift_bound",
    "validate",
    "SystemDiagnostics",
    "branch_arrays",
]

_EDGE = 1e-12        # absolute slack for closed-interval membership
_FLAT = 1e-9         # below this, an expansion excess counts as roundoff


@dataclass(frozen=True)
class MobiusBranch:
    """One homographic branch with unit determinant and a closed domain."""

    a: float
    b: float
    c: float
    d: float
    det: int
    lo: float
    hi: float
    label: str = ""

    def q(self, x):
        """Denominator c*x + d (never zero on the domain)."""
        return self.c * x + self.d

    def contains(self, x, tol=_EDGE):
        return self.lo - tol <= x <= self.hi + tol

    def apply(self, x, checked=True):
        if checked and not self.contains(x):
            raise OutOfDomain(f"{x} outside branch domain [{self.lo}, {self.hi}]")
        return (self.a * x + self.b) / (self.c * x + self.d)

    def derivative(self, x, checked=True):
        if checked and not self.contains(x):
            raise OutOfDomain(f"{x} outside branch domain [{self.lo}, {self.hi}]")
        q = self.c * x + self.d
        return self.det / (q * q)

    def image(self):
        """Image interval (endpoints of the monotone branch, sorted)."""
        u = self.apply(self.lo)
        v = self.apply(self.hi)
        return (u, v) if u <= v else (v, u)

    def inverse(self, xp, checked=True):
        """Preimage of xp under this branch (inverse matrix (d,-b,-c,a))."""
        if checked:
            ilo, ihi = self.image()
            span = max(1.0, abs(ilo), abs(ihi))
            if not ilo - _EDGE * span <= xp <= ihi + _EDGE * span:
                raise OutOfRange(f"{xp} outside branch image [{ilo}, {ihi}]")
        x = (self.d * xp - self.b) / (-self.c * xp + self.a)
        # clip roundoff so the preimage stays inside the closed domain
        return min(max(x, self.lo), self.hi)

    def expansion(self):
        """max over the domain of (cx+d)^2 = 1/|T'| (attained at an endpoint)."""
        return max(self.q(self.lo) ** 2, self.q(self.hi) ** 2)

    def shift(self):
        """max over the domain of |c(cx+d)| (attained at an endpoint)."""
        return max(abs(self.c * self.q(self.lo)), abs(self.c * self.q(self.hi)))

    def fixed_points(self):
        """Fixed points inside the domain, as (x*, T'(x*)) pairs."""
        out = []
        cc, lin, const = self.c, self.d - self.a, -self.b
        tol = _EDGE * max(1.0, abs(self.lo), abs(self.hi))
        if cc == 0.0:
            if lin == 0.0:
                # T(x) = x + b/d on the whole domain; fixed iff b = 0
                if const == 0.0:
                    out.append((self.lo, self.derivative(self.lo)))
                return out
            roots = [-const / lin]
        else:
            disc = lin * lin - 4.0 * cc * const
            if disc < 0.0:
                return out
            s = math.sqrt(disc)
            roots = [(-lin + s) / (2.0 * cc), (-lin - s) / (2.0 * cc)]
        for r in roots:
            if self.lo - tol <= r <= self.hi + tol:
                r = min(max(r, self.lo), self.hi)
                if not any(abs(r - p) <= tol for p, _ in out):
                    out.append((r, self.derivative(r)))
        return out

    def is_parabolic(self):
        """True iff some fixed point in the domain has derivative +1."""
        return any(abs(dv - 1.0) <= _FLAT for _, dv in self.fixed_points())


def normalize_branch(a, b, c, d, lo, hi, label=""):
    """Rescale (a,b,c,d) to determinant +-1 with c > 0 (or c=0, d>0).

    Raises ZeroDeterminant for singular matrices and PoleInDomain when the
    pole -d/c lies in the closed domain [lo, hi].
    """
    det0 = a * d - b * c
    if det0 == 0.0 or not math.isfinite(det0):
        raise ZeroDeterminant(f"matrix ({a},{b},{c},{d}) has determinant {det0}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise BadParameter(f"bad branch domain [{lo}, {hi}]")
    r = 1.0 / math.sqrt(abs(det0))
    a, b, c, d = a * r, b * r, c * r, d * r
    if c < 0.0 or (c == 0.0 and d < 0.0):
        a, b, c, d = -a, -b, -c, -d
    if c != 0.0:
        pole = -d / c
        # margin capped by the domain width so deep family branches with a
        # pole one width away (tiny but clear) are not swallowed
        tol = min(_EDGE * max(1.0, abs(lo), abs(hi)), 0.25 * (hi - lo))
        if lo - tol <= pole <= hi + tol:
            raise PoleInDomain(f"pole {pole} inside domain [{lo}, {hi}]")
    return MobiusBranch(a, b, c, d, 1 if det0 > 0 else -1, float(lo), float(hi), label)


def apply(branch, x):
    """Evaluate the branch at x (OutOfDomain outside the closed domain)."""
    return branch.apply(x)


def derivative(branch, x):
    """T'(x) = det / (cx+d)^2."""
    return branch.derivative(x)


def inverse_apply(branch, xp):
    """The unique preimage of xp in the branch domain (OutOfRange outside)."""
    return branch.inverse(xp)


@dataclass(frozen=True)
class BranchFamily:
    """Countable branch family: enumeration, digit lookup, tail bound.

    enumerate_fn(level) materializes the finite truncation at the given
    level; locate_fn(x) returns the branch containing x (None in a gap);
    tail_fn(level) bounds the Hausdorff error of truncating the set map,
    or None when no bound is known.  k_sup / shift_sup are closed-form
    suprema over the whole family; accumulation_fn(level) lists points
    where domains of omitted branches pile up (used to excuse cover gaps
    during validation).
    """

    enumerate_fn: object
    locate_fn: object
    tail_fn: object = None
    k_sup: float = None
    shift_sup: float = None
    accumulation_fn: object = None
    max_level: int = 10 ** 6


class PiecewiseSystem:
    """A piecewise homographic map on a closed interval."""

    PROBE_LEVEL = 64

    def __init__(self, interval, branches=None, family=None, name=None, params=None):
        lo, hi = float(interval[0]), float(interval[1])
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise BadParameter(f"bad system interval [{lo}, {hi}]")
        if (branches is None) == (family is None):
            raise BadParameter("system needs either branches or a family")
        self.interval = (lo, hi)
        self.family = family
        self.name = name
        self.params = dict(params or {})
        if branches is not None:
            branches = tuple(branches)
            if not branches:
                raise BadParameter("empty branch list")
            tol = _EDGE * max(1.0, abs(lo), abs(hi))
            for br in branches:
                if br.lo < lo - tol or br.hi > hi + tol:
                    raise BadParameter(
                        f"branch domain [{br.lo}, {br.hi}] outside interval [{lo}, {hi}]"
                    )
            self._branches = branches
        else:
            self._branches = None

    # --- introspection -----------------------------------------------------

    @property
    def is_finite(self):
        return self._branches is not None

    def branches(self, level=None):
        """Materialized branch list (finite systems ignore *level*)."""
        if self._branches is not None:
            return self._branches
        lv = self.PROBE_LEVEL if level is None else level
        if lv < 1 or lv > self.family.max_level:
            raise BadParameter(f"enumeration level {lv} out of range")
        return tuple(self.family.enumerate_fn(lv))

    def branch_count(self, level=None):
        return len(self.branches(level))

    def branch_at(self, x):
        """First branch (in enumeration order) whose domain contains x."""
        lo, hi = self.interval
        tol = _EDGE * max(1.0, abs(lo), abs(hi))
        if not lo - tol <= x <= hi + tol:
            raise OutOfDomain(f"{x} outside system interval [{lo}, {hi}]")
        if self._branches is not None:
            for br in self._branches:
                if br.contains(x):
                    return br
            raise NoBranch(f"no branch domain contains {x}")
        br = self.family.locate_fn(x)
        if br is None or not br.contains(x, tol=1e-9):
            raise NoBranch(f"no branch domain contains {x}")
        return br

    def tail_bound(self, level):
        if self.family is None:
            return 0.0
        if self.family.tail_fn is None:
            return None
        return self.family.tail_fn(level)

    def accumulation_points(self, level):
        if self.family is None or self.family.accumulation_fn is None:
            return ()
        return tuple(self.family.accumulation_fn(level))

    @property
    def key(self):
        """Hashable identity used for table caching and serialization."""
        if self.name is not None:
            return (self.name, tuple(sorted(self.params.items())))
        return ("custom", id(self))

    def __repr__(self):
        kind = f"{len(self._branches)} branches" if self.is_finite else "family"
        tag = self.name or "custom"
        return f"PiecewiseSystem({tag}, [{self.interval[0]:g}, {self.interval[1]:g}], {kind})"


def branch_at(system, x):
    """Module-level alias for PiecewiseSystem.branch_at."""
    return system.branch_at(x)


def expansion_bound(system, level=None):
    """k = sup over branches and domains of (cx+d)^2; must be <= 1.

    Values within roundoff of 1 are snapped to exactly 1 (weak expansion).
    Raises NotExpanding when some branch has (cx+d)^2 > 1 beyond roundoff,
    i.e. |T'| < 1 on a subinterval of positive length.
    """
    if system.family is not None and system.family.k_sup is not None:
        k = system.family.k_sup
    else:
        k = max(br.expansion() for br in system.branches(level))
    if k > 1.0 + _FLAT:
        raise NotExpanding(f"contraction bound k = {k} exceeds 1")
    return 1.0 if k > 1.0 - _FLAT else k


def is_weakly_expanding(system):
    """True when k = 1, i.e. the fiber maps are not a uniform contraction."""
    return expansion_bound(system) == 1.0


def shift_bound(system, level=None):
    """B = sup over branches and domains of |c(cx+d)| (fiber shift size).

    For families without a closed-form bound the supremum is probed at two
    enumeration levels; if still growing, UnboundedShift is raised.
    """
    fam = system.family
    if fam is not None and fam.shift_sup is not None:
        return fam.shift_sup
    if fam is None:
        return max(br.shift() for br in system.branches())
    lv = level or PiecewiseSystem.PROBE_LEVEL
    b1 = max(br.shift() for br in system.branches(lv))
    b2 = max(br.shift() for br in system.branches(min(2 * lv, fam.max_level)))
    if b2 > b1 * 1.01 + _EDGE:
        raise UnboundedShift(f"shift bound still growing: {b1} -> {b2}")
    return b2


@dataclass(frozen=True)
class SystemDiagnostics:
    """Structural report from validate(): partition, images, expansion."""

    k: float
    shift: float
    weakly_expanding: bool
    parabolic: tuple = ()            # (branch label, fixed point) pairs
    cover_gaps: tuple = ()           # uncovered (lo, hi) gaps, unexcused
    overlaps: tuple = ()             # (label_i, label_j, overlap length)
    image_gaps: tuple = ()           # interval minus union of branch images
    messages: tuple = ()

    @property
    def ok(self):
        return not (self.cover_gaps or self.overlaps or self.image_gaps)


def _complement_gaps(interval, pairs, tol):
    """Parts of *interval* not covered by the union of *pairs*."""
    lo, hi = interval
    gaps = []
    cursor = lo
    for p, q in sorted(pairs):
        if p > cursor + tol:
            gaps.append((cursor, min(p, hi)))
        cursor = max(cursor, q)
        if cursor >= hi - tol:
            break
    if cursor < hi - tol:
        gaps.append((cursor, hi))
    return gaps


def validate(system, level=None):
    """Structural diagnostics: domain partition, image cover, expansion.

    Never raises on structural defects; they are reported in the returned
    SystemDiagnostics so callers can decide (the attractor engine refuses
    parabolic systems, the CLI prints the report).
    """
    branches = system.branches(level)
    lo, hi = system.interval
    scale = max(1.0, abs(lo), abs(hi))
    tol = 1e-9 * scale

    k = expansion_bound(system, level)
    shift = shift_bound(system, level)
    messages = []

    parabolic = []
    for br in branches:
        for x, dv in br.fixed_points():
            if abs(dv - 1.0) <= _FLAT:
                parabolic.append((br.label, x))
                messages.append(f"branch {br.label!r}: indifferent fixed point at {x:g}")

    ordered = sorted(branches, key=lambda br: (br.lo, br.hi))
    overlaps = []
    for prev, nxt in zip(ordered, ordered[1:]):
        if nxt.lo < prev.hi - tol:
            overlaps.append((prev.label, nxt.label, prev.hi - nxt.lo))

    acc = system.accumulation_points(level or PiecewiseSystem.PROBE_LEVEL)
    cover_gaps = []
    for g0, g1 in _complement_gaps((lo, hi), [(br.lo, br.hi) for br in ordered], tol):
        if any(g0 - tol <= p <= g1 + tol for p in acc):
            continue
        cover_gaps.append((g0, g1))

    image_gaps = _complement_gaps((lo, hi), [br.image() for br in branches], tol)

    return SystemDiagnostics(
        k=k,
        shift=shift,
        weakly_expanding=(k == 1.0),
        parabolic=tuple(parabolic),
        cover_gaps=tuple(cover_gaps),
        overlaps=tuple(overlaps),
        image_gaps=tuple(image_gaps),
        messages=tuple(messages),
    )


@lru_cache(maxsize=32)
def _branch_arrays_cached(system, level):
    branches = system.branches(level)
    n = len(branches)
    arr = {
        name: np.empty(n) for name in ("a", "b", "c", "d", "lo", "hi", "img_lo", "img_hi")
    }
    det = np.empty(n)
    labels = []
    for i, br in enumerate(branches):
        arr["a"][i], arr["b"][i], arr["c"][i], arr["d"][i] = br.a, br.b, br.c, br.d
        arr["lo"][i], arr["hi"][i] = br.lo, br.hi
        arr["img_lo"][i], arr["img_hi"][i] = br.image()
        det[i] = br.det
        labels.append(br.label)
    arr["det"] = det
    arr["labels"] = labels
    return arr


def branch_arrays(system, level=None):
    """Branch coefficients as parallel numpy arrays (cached per system)."""
    if system.is_finite:
        level = 0
    elif level is None:
        level = PiecewiseSystem.PROBE_LEVEL
    return _branch_arrays_cached(system, level)
