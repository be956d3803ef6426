"""Compiled inner loops for the fast contrast curve.

All kernels release the GIL so that row blocks can run on plain threads,
each thread writing only to its own pair of accumulators.
"""

import numpy as np
from numba import njit


@njit(nogil=True, cache=True, inline="always")
def add_pair(lo, hi, contrast_sum, cardinality):
    # every threshold in [lo, hi) is straddled by the pair
    for t in range(lo, hi):
        contrast_sum[t] += min(hi - t, t - lo)
        cardinality[t] += 1


@njit(nogil=True, cache=True)
def accumulate_rows(pixels, offsets, row_start, row_stop, contrast_sum, cardinality):
    """Add the contribution of rows ``[row_start, row_stop)`` to the accumulators.

    Each row is paired with the translated line ``pixels[i + dy]`` shifted by
    ``dx`` columns, for every ``(dx, dy)`` in ``offsets``.  Columns whose
    translated neighbour falls outside the image are skipped.
    """
    height, width = pixels.shape
    for i in range(row_start, row_stop):
        cur_line = pixels[i]
        for k in range(offsets.shape[0]):
            dx = offsets[k, 0]
            dy = offsets[k, 1]
            ni = i + dy
            if ni < 0 or ni >= height:
                continue
            n_line = pixels[ni]
            j0 = max(0, -dx)
            j1 = min(width, width - dx)
            for j in range(j0, j1):
                a = cur_line[j]
                b = n_line[j + dx]
                add_pair(min(a, b), max(a, b), contrast_sum, cardinality)


def warmup():
    """Trigger compilation on a tiny input."""
    px = np.zeros((2, 2), dtype=np.uint8)
    offs = np.array([[1, 0], [0, 1]], dtype=np.int64)
    acc = np.zeros(256, dtype=np.int64)
    accumulate_rows(px, offs, 0, 2, acc, acc.copy())
