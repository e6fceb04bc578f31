"""Pure numpy implementation of the hot kernels.

Mirrors cfx._kernels (the compiled extension) operation for operation:
interval endpoints go through the same multiply, add, min, max sequence and
the same merge predicate, and the merged output does not depend on sort
stability, so both backends produce bit-identical results.
"""

import numpy as np

BACKEND = "python"


def theta_merge(row_start, src, slope, offset, fib_start, fib_lo, fib_hi, j0, j1, eps):
    """Map-and-merge step for target cells j0 <= j < j1.

    Each table row maps one source cell's fiber intervals through the
    affine map y -> slope*y + offset; per target cell the mapped intervals
    are sorted by left endpoint and merged whenever they come within eps.
    Returns (counts per cell, merged lows, merged highs).
    """
    n = j1 - j0
    r0, r1 = int(row_start[j0]), int(row_start[j1])
    counts = np.zeros(n, dtype=np.int64)
    if r1 == r0:
        return counts, np.empty(0), np.empty(0)
    rs = src[r0:r1]
    cnt = fib_start[rs + 1] - fib_start[rs]
    total = int(cnt.sum())
    if total == 0:
        return counts, np.empty(0), np.empty(0)

    # expand the CSR rows into one entry per mapped interval
    out_pos = np.cumsum(cnt) - cnt
    inner = np.arange(total, dtype=np.int64) - np.repeat(out_pos, cnt)
    fidx = np.repeat(fib_start[rs], cnt) + inner
    s = np.repeat(slope[r0:r1], cnt)
    t = np.repeat(offset[r0:r1], cnt)
    e1 = s * fib_lo[fidx] + t
    e2 = s * fib_hi[fidx] + t
    lo_m = np.minimum(e1, e2)
    hi_m = np.maximum(e1, e2)
    rows_per_cell = np.diff(row_start[j0 : j1 + 1])
    tgt = np.repeat(np.repeat(np.arange(n, dtype=np.int64), rows_per_cell), cnt)

    order = np.lexsort((lo_m, tgt))
    lo_m = lo_m[order]
    hi_m = hi_m[order]
    tgt = tgt[order]

    cell_counts = np.bincount(tgt, minlength=n)
    ends = np.cumsum(cell_counts)
    lows, highs = [], []
    for j in range(n):
        b = int(ends[j])
        a = b - int(cell_counts[j])
        if a == b:
            continue
        lo = lo_m[a:b]
        run = np.maximum.accumulate(hi_m[a:b])
        new_seg = np.empty(b - a, dtype=bool)
        new_seg[0] = True
        # a new segment starts when the next interval clears the running
        # maximum by more than eps; otherwise it merges.  Within a segment
        # the global running max equals the segment's own running max,
        # because every member's hi exceeds the previous segment's max.
        new_seg[1:] = lo[1:] > run[:-1] + eps
        idx = np.flatnonzero(new_seg)
        seg_end = np.append(idx[1:], b - a) - 1
        lows.append(lo[idx])
        highs.append(run[seg_end])
        counts[j] = len(idx)
    if not lows:
        return counts, np.empty(0), np.empty(0)
    return counts, np.concatenate(lows), np.concatenate(highs)


def gk_iterate(x, depth):
    """Iterate the Gauss map on the sample array in place.

    Entries at (or numerically indistinguishable from) zero are left alone;
    everything else maps through 1/x - floor(1/x).
    """
    for _ in range(depth):
        nz = x > 1e-300
        inv = 1.0 / x[nz]
        x[nz] = inv - np.floor(inv)
    return x
