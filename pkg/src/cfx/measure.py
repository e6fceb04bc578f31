"""Measures, densities, orbits, and statistical experiments.

Connects the three descriptions of the invariant object: the converged
fiber grid (set-map engine), closed-form densities on reference sheets,
and empirical orbit statistics.  Marginals of the planar set recover the
one-dimensional invariant density; transfer-operator residuals check a
claimed density directly against the branch inverses; long orbits give
Birkhoff averages to compare with the integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import gk_iterate
from .catalog import HurwitzMap, RawMap
from .errors import (
    BadParameter,
    NoBranch,
    OrbitEscapes,
    OutOfDomain,
    StructuralRefusal,
    ZeroInput,
    ZeroMass,
)
from .mobius import PiecewiseSystem, branch_arrays
from .skew import dual_step, skew_step

__all__ = [
    "DensityProfile",
    "PointCloud",
    "EmpiricalCDF",
    "fiber_measure",
    "density_profile",
    "ruelle_residual",
    "orbit_cloud",
    "marginal_histogram",
    "birkhoff_average",
    "gauss_kuzmin_experiment",
    "sample_attractor",
]

_EDGE = 1e-12


@dataclass(frozen=True)
class DensityProfile:
    """Density values at cell midpoints; integrates to 1 when normalized."""

    xs: np.ndarray
    ps: np.ndarray
    h: float

    def at(self, x):
        j = int(np.clip(np.searchsorted(self.xs, x) - 1, 0, len(self.xs) - 1))
        if j + 1 < len(self.xs) and abs(self.xs[j + 1] - x) < abs(self.xs[j] - x):
            j += 1
        return float(self.ps[j])


@dataclass(frozen=True)
class PointCloud:
    """Orbit samples: rows of coordinates plus one branch label per row.

    form 'skew' and 'dual' rows are (x, y); 'raw' rows are (x, 0);
    'hurwitz' rows are (Re z, Im z, Re w, Im w).  start and burn record
    how the orbit was produced.
    """

    form: str
    points: np.ndarray
    labels: tuple
    start: object = None
    burn: int = 0


@dataclass(frozen=True)
class EmpiricalCDF:
    xs: np.ndarray
    ps: np.ndarray

    def at(self, x):
        return float(np.interp(x, self.xs, self.ps))


def fiber_measure(grid, x):
    """Length of the fiber over x."""
    return grid.fiber_at(x).length


def density_profile(grid, normalize=True):
    """Fiber length per cell, optionally normalized to a probability density."""
    lengths = grid.fiber_lengths()
    if normalize:
        total = float(lengths.sum()) * grid.h
        if total <= 0.0:
            raise ZeroMass("attractor has zero planar measure; cannot normalize")
        lengths = lengths / total
    return DensityProfile(xs=grid.midpoints(), ps=lengths, h=grid.h)


def _eval_on(fn, xs):
    try:
        out = np.asarray(fn(xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([fn(float(v)) for v in xs], dtype=float)


def ruelle_residual(system, density, xs=None, level=None, n_points=512):
    """Sup of |(L rho)(x) - rho(x)| over the probe points.

    L is the transfer operator: (L rho)(x) sums rho at the branch preimages
    of x weighted by 1/|T'|.  A residual near zero certifies the density as
    invariant; the tolerance scales with the truncation tail for families.
    """
    if isinstance(system, RawMap):
        if xs is None:
            raise BadParameter("probe points are required for raw maps")
        worst = 0.0
        for x in xs:
            acc = 0.0
            for src, deriv in system.preimages(x):
                acc += density(src) / deriv
            worst = max(worst, abs(acc - density(x)))
        return worst
    lo, hi = system.interval
    if xs is None:
        h = (hi - lo) / n_points
        xs = lo + (np.arange(n_points) + 0.5) * h
    else:
        xs = np.asarray(xs, dtype=float)
    arrs = branch_arrays(system, level)
    edge = _EDGE * max(1.0, abs(lo), abs(hi))
    # extended precision: where the density is large the telescoped sum must
    # still land within an absolute 1e-12 of it
    xl = xs.astype(np.longdouble)
    acc = np.zeros_like(xl)
    a, b, c, d = (arrs[k].astype(np.longdouble) for k in "abcd")
    for i in range(len(a)):
        mask = (xs >= arrs["img_lo"][i] - edge) & (xs <= arrs["img_hi"][i] + edge)
        if not mask.any():
            continue
        xm = xl[mask]
        src = (d[i] * xm - b[i]) / (a[i] - c[i] * xm)
        np.clip(src, arrs["lo"][i], arrs["hi"][i], out=src)
        q = c[i] * src + d[i]
        acc[mask] += _eval_on(density, src) * (q * q)
    return float(np.abs(acc - _eval_on(density, xl)).max())


def _default_start(system):
    lo, hi = system.interval
    return round(lo + (math.sqrt(2.0) - 1.0) * (hi - lo), 6)


_STEP_ERRORS = (NoBranch, OutOfDomain, ZeroDivisionError, OverflowError)


def _step_with_nudge(step, system, x, rest, index):
    lo, hi = system.interval
    span = hi - lo
    try:
        return step(system, (x,) + rest)
    except _STEP_ERRORS:
        pass
    for eps in (1e-12, 1e-9):
        for cand in (x + eps * span, x - eps * span):
            cand = min(max(cand, lo), hi)
            try:
                return step(system, (cand,) + rest)
            except _STEP_ERRORS:
                continue
    raise OrbitEscapes(f"orbit left the branch domains at x = {x!r} (step {index})")


def orbit_cloud(system, form=None, start=None, burn=100, count=20000):
    """Deterministic orbit sample after a burn-in.

    form defaults to the natural one for the system type: 'skew' for
    piecewise homographic systems (alternatives 'dual', 'raw'), 'raw' for
    raw interval maps, 'hurwitz' for the complex step.  Raises
    OrbitEscapes when the orbit leaves every branch domain.
    """
    if burn < 0 or count < 1:
        raise BadParameter(f"need burn >= 0 and count >= 1, got {burn}, {count}")
    if form is None:
        form = (
            "hurwitz"
            if isinstance(system, HurwitzMap)
            else "raw"
            if isinstance(system, RawMap)
            else "skew"
        )
    if form == "hurwitz":
        if not isinstance(system, HurwitzMap):
            raise StructuralRefusal("form 'hurwitz' needs the complex step")
        z = complex(start) if start is not None else system.default_start
        w = 0.0 + 0.0j
        pts = np.empty((count, 4))
        labels = []
        for i in range(burn + count):
            if i >= burn:
                pts[i - burn] = (z.real, z.imag, w.real, w.imag)
            try:
                (z, w), label = system.step((z, w))
            except ZeroInput:
                raise OrbitEscapes(f"orbit hit z = 0 at step {i}") from None
            if i >= burn:
                labels.append(label)
        return PointCloud(
            form="hurwitz", points=pts, labels=tuple(labels),
            start=complex(start) if start is not None else system.default_start,
            burn=burn,
        )
    if isinstance(system, RawMap):
        if form != "raw":
            raise StructuralRefusal(
                f"{system.name} has no branch matrices; only form 'raw' applies"
            )
        x = float(start) if start is not None else system.default_start
        pts = np.zeros((count, 2))
        labels = []
        for i in range(burn + count):
            if i >= burn:
                pts[i - burn, 0] = x
                labels.append(system.label_of(x))
            try:
                x = system.apply(x)
            except (ValueError, ZeroDivisionError, OverflowError):
                raise OrbitEscapes(f"orbit escaped at x = {x!r} (step {i})") from None
        return PointCloud(
            form="raw", points=pts, labels=tuple(labels),
            start=float(start) if start is not None else system.default_start,
            burn=burn,
        )
    if not isinstance(system, PiecewiseSystem):
        raise StructuralRefusal(f"cannot iterate a {type(system).__name__}")
    if form not in ("skew", "dual", "raw"):
        raise BadParameter(f"unknown orbit form {form!r}")
    if start is None:
        x, y = _default_start(system), 0.0
    elif np.ndim(start) == 0:
        x, y = float(start), 0.0
    else:
        x, y = float(start[0]), float(start[1])
    x0, y0 = x, y
    step = dual_step if form == "dual" else skew_step
    pts = np.empty((count, 2))
    labels = []
    for i in range(burn + count):
        if i >= burn:
            pts[i - burn] = (x, 0.0 if form == "raw" else y)
        (x2, y2), label = _step_with_nudge(step, system, x, (y,), i)
        x, y = x2, y2
        if i >= burn:
            labels.append(label)
    return PointCloud(
        form=form, points=pts, labels=tuple(labels), start=(x0, y0), burn=burn
    )


def marginal_histogram(cloud, bins=100, domain=None):
    """Normalized histogram of the first orbit coordinate."""
    xs = cloud.points[:, 0]
    if domain is None:
        domain = (float(xs.min()), float(xs.max()))
    counts, edges = np.histogram(xs, bins=bins, range=domain, density=True)
    mids = 0.5 * (edges[:-1] + edges[1:])
    return DensityProfile(xs=mids, ps=counts, h=float(edges[1] - edges[0]))


def birkhoff_average(system, f, start=None, n=100000):
    """Time average of f along the base orbit."""
    if n < 1:
        raise BadParameter(f"need at least one step, got {n}")
    if isinstance(system, RawMap):
        x = float(start) if start is not None else system.default_start
        total = 0.0
        for i in range(n):
            total += f(x)
            try:
                x = system.apply(x)
            except (ValueError, ZeroDivisionError, OverflowError):
                raise OrbitEscapes(f"orbit escaped at x = {x!r} (step {i})") from None
        return total / n
    x = float(start) if start is not None else _default_start(system)
    total = 0.0
    for i in range(n):
        total += f(x)
        (x, _), _ = _step_with_nudge(skew_step, system, x, (0.0,), i)
    return total / n


def gauss_kuzmin_experiment(samples=100000, depth=20, bins=100, seed=42):
    """Iterate the fractional-inverse map on a uniform sample.

    Returns (EmpiricalCDF on a uniform grid, sup deviation from the known
    law at that depth: the uniform cdf x at depth 0, the limiting cdf
    log2(1+x) at any positive depth).
    """
    if samples < 1 or depth < 0 or bins < 1:
        raise BadParameter("need samples >= 1, depth >= 0, bins >= 1")
    rng = np.random.default_rng(seed)
    x = rng.random(int(samples))
    x = gk_iterate(x, int(depth))
    grid = np.linspace(0.0, 1.0, bins + 1)
    ps = np.searchsorted(np.sort(x), grid, side="right") / len(x)
    limit = grid if depth == 0 else np.log2(1.0 + grid)
    deviation = float(np.abs(ps - limit).max())
    return EmpiricalCDF(xs=grid, ps=ps), deviation


def sample_attractor(grid, count=10000, seed=42):
    """Random points of the fiber grid: uniform cell, length-weighted fiber.

    x is the cell midpoint, y uniform inside the chosen fiber interval.
    """
    if count < 1:
        raise BadParameter(f"need at least one sample, got {count}")
    rng = np.random.default_rng(seed)
    n = grid.n_cells
    cells = rng.integers(0, n, size=count)
    mids = grid.midpoints()
    out = np.empty((count, 2))
    for i, j in enumerate(cells):
        a, b = int(grid.start[j]), int(grid.start[j + 1])
        lows = grid.flo[a:b]
        highs = grid.fhi[a:b]
        lens = highs - lows
        total = float(lens.sum())
        if total <= 0.0:
            k = rng.integers(0, b - a)
        else:
            k = int(np.searchsorted(np.cumsum(lens), rng.random() * total, "right"))
            k = min(k, b - a - 1)
        y = lows[k] + rng.random() * (highs[k] - lows[k])
        out[i] = (mids[j], y)
    return out
