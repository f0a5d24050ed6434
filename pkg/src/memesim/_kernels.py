"""Compiled inner loops for the pairwise similarity scan.

Every dot product is accumulated in float64 over a fixed 8-stripe tree,
so a given pair's score is bit-identical no matter the tile size or the
number of worker threads driving the block scan.  Importing this module
pulls in numba; callers import it lazily to keep CLI startup cheap.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _dot8(u, v):
    n = u.shape[0]
    m = n - (n % 8)
    a0 = 0.0
    a1 = 0.0
    a2 = 0.0
    a3 = 0.0
    a4 = 0.0
    a5 = 0.0
    a6 = 0.0
    a7 = 0.0
    k = 0
    while k < m:
        a0 += u[k] * v[k]
        a1 += u[k + 1] * v[k + 1]
        a2 += u[k + 2] * v[k + 2]
        a3 += u[k + 3] * v[k + 3]
        a4 += u[k + 4] * v[k + 4]
        a5 += u[k + 5] * v[k + 5]
        a6 += u[k + 6] * v[k + 6]
        a7 += u[k + 7] * v[k + 7]
        k += 8
    tail = 0.0
    for j in range(m, n):
        tail += u[j] * v[j]
    return (((a0 + a1) + (a2 + a3)) + ((a4 + a5) + (a6 + a7))) + tail


@njit(cache=True, nogil=True)
def block_scores(img, txt, i0, i1, j0, j1, ii, tt, it, ti):
    """Fill the four cross-modal score blocks for rows [i0,i1) x [j0,j1).

    img and txt are float64 (N, D) with unit rows (zero rows allowed; their
    scores are garbage and must be masked by the caller).
    """
    for a in range(i0, i1):
        ra = a - i0
        for b in range(j0, j1):
            rb = b - j0
            ii[ra, rb] = _dot8(img[a], img[b])
            tt[ra, rb] = _dot8(txt[a], txt[b])
            it[ra, rb] = _dot8(img[a], txt[b])
            ti[ra, rb] = _dot8(txt[a], img[b])


def warmup() -> None:
    """Force JIT compilation with a tiny input (first call in a process)."""
    one = np.ones((2, 9), dtype=np.float64)
    buf = np.empty((2, 2), dtype=np.float64)
    block_scores(one, one, 0, 2, 0, 2, buf, buf.copy(), buf.copy(), buf.copy())
