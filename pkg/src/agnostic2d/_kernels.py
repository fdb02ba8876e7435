"""Compiled loops for the counting structures.

Orientation signs use the float determinant with the same forward error
bound as :func:`agnostic2d.geom.orientation`. Cells the bound cannot
decide are provisionally treated as "on the line" and reported back so
the caller can settle them exactly.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_EPS = np.finfo(float).eps / 2.0
ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
UNSURE = 2


@njit(cache=True)
def fsign(px, py, qx, qy, rx, ry):
    if (rx == px and ry == py) or (rx == qx and ry == qy):
        return 0
    detl = (qx - px) * (ry - py)
    detr = (qy - py) * (rx - px)
    det = detl - detr
    bound = ERRBOUND * (abs(detl) + abs(detr))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    if bound == 0.0:
        return 0
    return UNSURE


@njit(cache=True)
def _reserve(a, used, extra):
    if used + extra <= len(a):
        return a
    b = np.empty(max(2 * len(a), used + extra), dtype=a.dtype)
    b[:used] = a[:used]
    return b


@njit(cache=True)
def index_rows(A, vertical, sx, sy, sw, prefix):
    """Fill ``prefix[l, i+1]`` with the weight of x-sorted points ``0..i`` on or
    below line ``l``. Returns on-line cells and undecided cells as (row, col)."""
    L = A.shape[0]
    m = len(sx)
    on_r = np.empty(64, np.int64)
    on_c = np.empty(64, np.int64)
    un_r = np.empty(64, np.int64)
    un_c = np.empty(64, np.int64)
    non = 0
    nun = 0
    for l in range(L):
        prefix[l, 0] = 0
        if vertical[l]:
            for i in range(m):
                prefix[l, i + 1] = 0
            continue
        # room for a whole row, so the inner loop never reallocates
        on_r = _reserve(on_r, non, m)
        on_c = _reserve(on_c, non, m)
        un_r = _reserve(un_r, nun, m)
        un_c = _reserve(un_c, nun, m)
        px, py, qx, qy = A[l, 0], A[l, 1], A[l, 2], A[l, 3]
        acc = 0
        for i in range(m):
            s = fsign(px, py, qx, qy, sx[i], sy[i])
            if s == UNSURE:
                un_r[nun] = l
                un_c[nun] = i
                nun += 1
                s = 0
            if s <= 0:
                acc += sw[i]
                if s == 0:
                    on_r[non] = l
                    on_c[non] = i
                    non += 1
            prefix[l, i + 1] = acc
    return on_r[:non], on_c[:non], un_r[:nun], un_c[:nun]


@njit(cache=True)
def brute_pair_tables(px, py, sx, sy, sw):
    """Edge-trapezoid tables for all query pairs by scanning the x-sorted sample.

    Returns the four tables plus undecided cells ``(a, b, sample index)``.
    """
    n = len(px)
    le_o = np.zeros((n, n), np.int64)
    le_c = np.zeros((n, n), np.int64)
    lt_o = np.zeros((n, n), np.int64)
    lt_c = np.zeros((n, n), np.int64)
    un = np.empty((16, 3), np.int64)
    nun = 0
    for a in range(n):
        xa = px[a]
        i0 = np.searchsorted(sx, xa)
        for b in range(n):
            xb = px[b]
            if not xb > xa:
                continue
            i1 = np.searchsorted(sx, xb, side="right")
            v_le_o = 0
            v_le_c = 0
            v_lt_o = 0
            v_lt_c = 0
            for i in range(i0, i1):
                s = fsign(xa, py[a], xb, py[b], sx[i], sy[i])
                if s == UNSURE:
                    if nun >= un.shape[0]:
                        bigger = np.empty((2 * un.shape[0], 3), np.int64)
                        bigger[:nun] = un[:nun]
                        un = bigger
                    un[nun, 0] = a
                    un[nun, 1] = b
                    un[nun, 2] = i
                    nun += 1
                    s = 0
                w = sw[i]
                open_ = sx[i] < xb
                if s <= 0:
                    v_le_c += w
                    if open_:
                        v_le_o += w
                    if s < 0:
                        v_lt_c += w
                        if open_:
                            v_lt_o += w
            le_o[a, b] = v_le_o
            le_c[a, b] = v_le_c
            lt_o[a, b] = v_lt_o
            lt_c[a, b] = v_lt_c
    return le_o, le_c, lt_o, lt_c, un[:nun]
