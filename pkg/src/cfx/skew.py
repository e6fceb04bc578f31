"""Planar extensions of piecewise homographic maps.

Two coordinate systems for the second (fiber) coordinate:

* skew form: (x, y) -> (T(x), det * ((cx+d)^2 y - c(cx+d))) for the branch
  at x.  The fiber map is affine with slope det*(cx+d)^2, so the planar map
  has Jacobian determinant det^2 = 1 everywhere.
* dual form: (x, v) -> (T(x), (dv - c)/(a - bv)), the homographic action on
  the conjugate coordinate v = y / (1 - xy).

The change of variable to_dual intertwines the two forms wherever
1 - xy != 0; from_dual is its inverse v -> v/(1+xv).  hurwitz_step is the
complex-plane analogue with Gaussian-integer digits.
"""

from __future__ import annotations

import math

from .errors import PoleInDual, Singular, StraddlesBranchBoundary, ZeroInput

__all__ = [
    "skew_step",
    "dual_step",
    "to_dual",
    "from_dual",
    "jacobian_determinant",
    "dual_density",
    "hurwitz_step",
    "gaussian_round",
    "format_gaussian",
]

_TINY = 1e-12


def skew_step(system, point):
    """One step of the area-preserving skew extension.

    Returns ((x', y'), branch_label).  Raises OutOfDomain / NoBranch via
    the branch lookup when x is not interior to any branch.
    """
    x, y = point
    br = system.branch_at(x)
    q = br.c * x + br.d
    xp = (br.a * x + br.b) / q
    yp = br.det * (q * q * y - br.c * q)
    return (xp, yp), br.label


def dual_step(system, point):
    """One step of the dual (homographic) extension on (x, v)."""
    x, v = point
    br = system.branch_at(x)
    den = br.a - br.b * v
    if abs(den) < _TINY * max(1.0, abs(v)):
        raise PoleInDual(f"dual denominator a - b*v vanishes at v = {v}")
    xp = (br.a * x + br.b) / (br.c * x + br.d)
    vp = (br.d * v - br.c) / den
    return (xp, vp), br.label


def to_dual(point):
    """(x, y) -> (x, y/(1-xy)); Singular when 1 - xy vanishes."""
    x, y = point
    den = 1.0 - x * y
    if abs(den) < _TINY * max(1.0, abs(x * y)):
        raise Singular(f"conjugacy undefined: 1 - xy = {den}")
    return x, y / den


def from_dual(point):
    """(x, v) -> (x, v/(1+xv)); inverse of to_dual."""
    x, v = point
    den = 1.0 + x * v
    if abs(den) < _TINY * max(1.0, abs(x * v)):
        raise Singular(f"conjugacy undefined: 1 + xv = {den}")
    return x, v / den


def jacobian_determinant(system, point, h=None):
    """|det| of the skew_step Jacobian at *point*, by central differences.

    With h=None the x-step adapts to the local branch: the truncation error
    of the x'-column is ~ (h c/Q)^2 relative, so h = 1e-4 |Q/c| keeps it
    near 1e-8 even on branches with tiny domains (large digits).  The
    stencil must stay inside one branch; otherwise
    StraddlesBranchBoundary is raised.  For any unit-determinant branch
    the analytic value is exactly 1.
    """
    x, y = point
    br = system.branch_at(x)
    if h is None:
        q = abs(br.c * x + br.d)
        lo, hi = system.interval
        scale = (q / abs(br.c)) if br.c != 0.0 else (hi - lo)
        h = 1e-4 * scale
        room = min(x - br.lo, br.hi - x)
        # below this step the ulp/h roundoff of the quotients dominates;
        # refuse rather than return a digit-starved determinant
        floor = 1e-7 * scale
        if 0.0 < room and 0.5 * room < floor:
            raise StraddlesBranchBoundary(
                f"point {x} is too close to a branch edge for a stable stencil"
            )
        if room > 0.0:
            h = min(h, 0.5 * room)
    lab_m = system.branch_at(x - h).label
    lab_p = system.branch_at(x + h).label
    if lab_m != lab_p or lab_m != br.label:
        raise StraddlesBranchBoundary(f"stencil at {x} +- {h} crosses a branch boundary")
    # the step is affine in y, so the y-column difference has no truncation
    # error at any step; a unit-scale step keeps its roundoff tiny even on
    # branches where dy'/dy = Q^2 is ~1e-8
    hy = max(1.0, abs(y))
    (fx_p, fy_p), _ = skew_step(system, (x + h, y))
    (fx_m, fy_m), _ = skew_step(system, (x - h, y))
    (gx_p, gy_p), _ = skew_step(system, (x, y + hy))
    (gx_m, gy_m), _ = skew_step(system, (x, y - hy))
    dxdx = (fx_p - fx_m) / (2.0 * h)
    dydx = (fy_p - fy_m) / (2.0 * h)
    dxdy = (gx_p - gx_m) / (2.0 * hy)
    dydy = (gy_p - gy_m) / (2.0 * hy)
    return abs(dxdx * dydy - dxdy * dydx)


def dual_density(x, v):
    """Planar density 1/(1+xv)^2 carried by the dual coordinates."""
    den = 1.0 + x * v
    if abs(den) < _TINY * max(1.0, abs(x * v)):
        raise Singular(f"dual density pole: 1 + xv = {den}")
    return 1.0 / (den * den)


def _round_half_to_zero(t):
    return math.copysign(math.ceil(abs(t) - 0.5), t)


def gaussian_round(z):
    """Nearest Gaussian integer, ties rounded toward zero per component."""
    return complex(_round_half_to_zero(z.real), _round_half_to_zero(z.imag))


def format_gaussian(q):
    """Compact digit label like '2-1i' (CSV safe, no spaces)."""
    re, im = int(q.real), int(q.imag)
    if im == 0:
        return f"{re:+d}"
    return f"{re:+d}{im:+d}i"


def hurwitz_step(pair):
    """Complex continued-fraction step ((z, w) -> (1/z - q, 1/(w + q))).

    q is the Gaussian integer nearest to 1/z, so z' stays in the unit
    square max(|Re|,|Im|) <= 1/2.  Returns ((z', w'), digit_label).
    """
    z, w = pair
    if z == 0:
        raise ZeroInput("complex step undefined at z = 0")
    inv = 1.0 / z
    q = gaussian_round(inv)
    zp = inv - q
    if w + q == 0:
        raise PoleInDual(f"dual coordinate pole: w + q = 0 with q = {q}")
    wp = 1.0 / (w + q)
    return (zp, wp), format_gaussian(q)
