"""Minimal deterministic SVG rendering (no plotting dependency).

Output is plain text built in a fixed order with fixed float formatting,
so identical inputs give byte-identical files.  Two views: a point scatter
colored by branch label (first-appearance order through a 12-color
palette), and the fiber grid drawn as vertical segments.
"""

from __future__ import annotations

from .errors import BadInput

__all__ = ["scatter_svg", "grid_svg", "frame_svg", "save_svg", "PALETTE"]

PALETTE = (
    "#4477aa",
    "#ee6677",
    "#228833",
    "#ccbb44",
    "#66ccee",
    "#aa3377",
    "#bbbbbb",
    "#222255",
    "#225555",
    "#665522",
    "#884444",
    "#557722",
)

_W, _H, _M = 640.0, 480.0, 48.0


def _f(v):
    return format(v, ".2f")


def _bounds(vals):
    lo, hi = min(vals), max(vals)
    span = hi - lo
    if span <= 0.0:
        pad = max(abs(lo), 1.0) * 0.05
    else:
        pad = span * 0.05
    return lo - pad, hi + pad


def _frame(xlo, xhi, ylo, yhi, title):
    sx = (_W - 2.0 * _M) / (xhi - xlo)
    sy = (_H - 2.0 * _M) / (yhi - ylo)

    def px(x):
        return _M + (x - xlo) * sx

    def py(y):
        return _H - _M - (y - ylo) * sy

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{int(_W)}" height="{int(_H)}" '
        f'viewBox="0 0 {int(_W)} {int(_H)}">',
        f'<rect width="{int(_W)}" height="{int(_H)}" fill="white"/>',
        f'<rect x="{_f(_M)}" y="{_f(_M)}" width="{_f(_W - 2 * _M)}" '
        f'height="{_f(_H - 2 * _M)}" fill="none" stroke="#333333"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_f(_W / 2)}" y="{_f(_M * 0.6)}" font-family="monospace" '
            f'font-size="13" text-anchor="middle">{_escape(title)}</text>'
        )
    for i in range(5):
        fx = xlo + (xhi - xlo) * i / 4.0
        fy = ylo + (yhi - ylo) * i / 4.0
        x = px(fx)
        y = py(fy)
        parts.append(
            f'<line x1="{_f(x)}" y1="{_f(_H - _M)}" x2="{_f(x)}" '
            f'y2="{_f(_H - _M + 4)}" stroke="#333333"/>'
        )
        parts.append(
            f'<text x="{_f(x)}" y="{_f(_H - _M + 16)}" font-family="monospace" '
            f'font-size="10" text-anchor="middle">{format(fx, ".4g")}</text>'
        )
        parts.append(
            f'<line x1="{_f(_M - 4)}" y1="{_f(y)}" x2="{_f(_M)}" '
            f'y2="{_f(y)}" stroke="#333333"/>'
        )
        parts.append(
            f'<text x="{_f(_M - 6)}" y="{_f(y + 3)}" font-family="monospace" '
            f'font-size="10" text-anchor="end">{format(fy, ".4g")}</text>'
        )
    return parts, px, py


def _escape(text):
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def scatter_svg(xs, ys, labels=None, title=None):
    """Scatter of (xs[i], ys[i]) colored by label first-appearance order."""
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    if len(xs) != len(ys) or not xs:
        raise BadInput(f"need matching nonempty coordinates, got {len(xs)}, {len(ys)}")
    if labels is not None and len(labels) != len(xs):
        raise BadInput(f"{len(labels)} labels for {len(xs)} points")
    xlo, xhi = _bounds(xs)
    ylo, yhi = _bounds(ys)
    parts, px, py = _frame(xlo, xhi, ylo, yhi, title)
    color_of = {}
    for i in range(len(xs)):
        if labels is None:
            color = PALETTE[0]
        else:
            key = str(labels[i])
            if key not in color_of:
                color_of[key] = PALETTE[len(color_of) % len(PALETTE)]
            color = color_of[key]
        parts.append(
            f'<circle cx="{_f(px(xs[i]))}" cy="{_f(py(ys[i]))}" r="0.5" '
            f'fill="{color}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def grid_svg(grid, title=None):
    """Fiber grid as vertical segments, one per fiber interval."""
    ylo, yhi = grid.bounds()
    if yhi <= ylo:
        yhi = ylo + 1.0
    pad = (yhi - ylo) * 0.05
    parts, px, py = _frame(grid.lo, grid.hi, ylo - pad, yhi + pad, title)
    mids = grid.midpoints()
    span_px = (_W - 2.0 * _M) / grid.n_cells
    width = _f(max(span_px, 0.5))
    for j in range(grid.n_cells):
        x = _f(px(float(mids[j])))
        a, b = int(grid.start[j]), int(grid.start[j + 1])
        for k in range(a, b):
            y1 = py(float(grid.fhi[k]))
            y2 = py(float(grid.flo[k]))
            if y2 - y1 < 0.5:
                mid = 0.5 * (y1 + y2)
                y1, y2 = mid - 0.25, mid + 0.25
            parts.append(
                f'<line x1="{x}" y1="{_f(y1)}" x2="{x}" y2="{_f(y2)}" '
                f'stroke="{PALETTE[0]}" stroke-width="{width}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def frame_svg(xlo=0.0, xhi=1.0, ylo=0.0, yhi=1.0, title=None):
    """Axes and ticks only; the rendering of an empty table."""
    parts, _, _ = _frame(xlo, xhi, ylo, yhi, title)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def save_svg(path, text):
    with open(path, "w") as fh:
        fh.write(text)
