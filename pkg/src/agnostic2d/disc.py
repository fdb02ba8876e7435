"""Exact asymmetric discrepancy (positives minus negatives) of closed regions.

Two counters answer the same queries against a fixed labelled sample:

* :class:`ExhaustiveCounter` scans every sample point (the normative
  semantics).
* :class:`LineAnchoredIndex` pre-registers the finite family of lines that
  query edges may lie on. For each line it stores the sample sorted by ``x``
  with prefix sums of the weights lying below (or on) the line, so the
  weight under a directed edge segment costs two binary searches. A polygon
  is the signed sum of its edge trapezoids: upper-chain edges add the closed
  region below them, lower-chain edges subtract the open region below them.
"""
from __future__ import annotations

import itertools

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import EmptySample, UnregisteredLine
from .geom import Anchor, ConvexPolygon, as_points, orientation, orient_sign, polygon_contains


@dataclass(eq=False)
class LabeledPointSet:
    """A multiset of labelled points. Labels are 0/1; duplicates are allowed."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.points = as_points(self.points)
        self.labels = np.asarray(self.labels, dtype=np.int8).reshape(-1)
        if len(self.labels) != len(self.points):
            raise ValueError("points and labels differ in length")
        if np.any((self.labels != 0) & (self.labels != 1)):
            raise ValueError("labels must be 0 or 1")

    @classmethod
    def empty(cls) -> "LabeledPointSet":
        return cls(np.zeros((0, 2)), np.zeros(0, dtype=np.int8))

    @classmethod
    def concat(cls, parts: Iterable["LabeledPointSet"]) -> "LabeledPointSet":
        parts = list(parts)
        if not parts:
            return cls.empty()
        return cls(np.concatenate([p.points for p in parts]), np.concatenate([p.labels for p in parts]))

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def total(self) -> int:
        return len(self.labels)

    @property
    def positives(self) -> int:
        return int(self.labels.sum())

    @property
    def weights(self) -> np.ndarray:
        return 2 * self.labels.astype(np.int64) - 1

    def subset(self, idx) -> "LabeledPointSet":
        return LabeledPointSet(self.points[idx], self.labels[idx])

    def same_multiset(self, other: "LabeledPointSet") -> bool:
        if len(self) != len(other):
            return False
        a = np.column_stack([self.points, self.labels])
        b = np.column_stack([other.points, other.labels])
        a = a[np.lexsort(a.T[::-1])]
        b = b[np.lexsort(b.T[::-1])]
        return bool(np.array_equal(a, b))


def err_from_disc(disc: int, positives: int, total: int) -> Fraction:
    """Empirical risk of a region from its discrepancy: ``(|S+| - disc) / |S|``."""
    if total <= 0:
        raise EmptySample("empirical risk is undefined on an empty sample")
    if abs(disc) > total:
        raise ValueError("|disc| cannot exceed the sample size")
    return Fraction(positives - disc, total)


def mistakes(mask_inside: np.ndarray, labels: np.ndarray) -> int:
    """Misclassified count of the indicator ``mask_inside`` against ``labels``."""
    return int(np.count_nonzero(mask_inside.astype(np.int8) != labels))


@dataclass
class PairTables:
    """Edge-trapezoid weights for every ordered pair of query points.

    For ``x[a] < x[b]`` the four arrays hold the sample weight below the line
    through ``a`` and ``b`` with ``x`` in ``[x[a], x[b])`` or ``[x[a], x[b]]``,
    counting points on the line (``le``) or not (``lt``). Entries with
    ``x[a] >= x[b]`` are zero. ``segment`` is the weight on the closed
    segment ``ab`` (symmetric), ``point`` the weight sitting exactly on each
    query point.
    """

    x: np.ndarray
    le_open: np.ndarray
    le_closed: np.ndarray
    lt_open: np.ndarray
    lt_closed: np.ndarray
    segment: np.ndarray
    point: np.ndarray

    def combine(self, scale: int, other: "PairTables", other_scale: int) -> "PairTables":
        """Entrywise ``scale * self + other_scale * other``."""
        return PairTables(
            self.x,
            *(scale * getattr(self, f) + other_scale * getattr(other, f)
              for f in ("le_open", "le_closed", "lt_open", "lt_closed", "segment", "point")),
        )


def _point_weights(S: LabeledPointSet, pts: np.ndarray) -> np.ndarray:
    """Total sample weight sitting exactly on each query point."""
    if len(S) == 0 or len(pts) == 0:
        return np.zeros(len(pts), dtype=np.int64)
    both = np.concatenate([S.points, pts]) + 0.0
    # complex numbers sort lexicographically, a cheap 1-d key for (x, y)
    _, inv = np.unique(both[:, 0] + 1j * both[:, 1], return_inverse=True)
    acc = np.bincount(inv[:len(S)], weights=S.weights, minlength=inv.max() + 1)
    return acc[inv[len(S):]].astype(np.int64)


def _vertical_segment_weights(S: LabeledPointSet, pts: np.ndarray, seg: np.ndarray) -> None:
    w = S.weights
    _, inv, counts = np.unique(pts[:, 0], return_inverse=True, return_counts=True)
    for g in np.nonzero(counts > 1)[0]:
        group = np.nonzero(inv == g)[0]
        for a, b in itertools.combinations(group.tolist(), 2):
            lo, hi = sorted((pts[a, 1], pts[b, 1]))
            m = (S.points[:, 0] == pts[a, 0]) & (S.points[:, 1] >= lo) & (S.points[:, 1] <= hi)
            seg[a, b] = seg[b, a] = int(w[m].sum())


class ExhaustiveCounter:
    """Linear-scan discrepancy; the reference semantics for every query."""

    mode = "exhaustive"

    def __init__(self, S: LabeledPointSet):
        self.S = S
        self._w = S.weights
        self._xsorted = None

    def _sorted(self):
        if self._xsorted is None:
            order = np.lexsort((self.S.points[:, 1], self.S.points[:, 0]))
            self._xsorted = (np.ascontiguousarray(self.S.points[order, 0]),
                             np.ascontiguousarray(self.S.points[order, 1]),
                             self._w[order].astype(np.int64))
        return self._xsorted

    def disc_polygon(self, P: ConvexPolygon) -> int:
        if len(self.S) == 0:
            return 0
        return int(self._w[polygon_contains(P, self.S.points)].sum())

    def disc_triangle(self, T: ConvexPolygon) -> int:
        if len(T) != 3:
            raise ValueError("expected a triangle")
        return self.disc_polygon(T)

    def disc_batch(self, anchors: np.ndarray, chunk: int = 4096) -> np.ndarray:
        """Discrepancy of intersections of closed halfplanes.

        ``anchors`` has shape ``(T, k, 4)``: per region, ``k`` directed lines
        ``(px, py, qx, qy)`` whose left sides are intersected.
        """
        anchors = np.asarray(anchors, dtype=float)
        T = len(anchors)
        out = np.zeros(T, dtype=np.int64)
        if len(self.S) == 0 or T == 0:
            return out
        sx, sy = self.S.points[:, 0], self.S.points[:, 1]
        step = max(1, chunk * 64 // max(1, len(self.S)))
        for s in range(0, T, step):
            a = anchors[s:s + step]
            inside = np.ones((len(a), len(sx)), dtype=bool)
            for e in range(a.shape[1]):
                inside &= orient_sign(a[:, e, 0:1], a[:, e, 1:2], a[:, e, 2:3], a[:, e, 3:4], sx, sy) >= 0
            out[s:s + step] = inside.astype(np.int64) @ self._w
        return out

    def pair_tables(self, pts) -> PairTables:
        """Brute-force edge-trapezoid tables, O(n^2 |S|)."""
        pts = as_points(pts)
        sx, sy, sw = self._sorted()
        le_o, le_c, lt_o, lt_c, un = _kernels.brute_pair_tables(
            np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]), sx, sy, sw)
        for a, b, i in un.tolist():
            e = orientation(pts[a], pts[b], (sx[i], sy[i]))
            opened = sx[i] < pts[b, 0]
            if e < 0:
                lt_c[a, b] += sw[i]
                lt_o[a, b] += sw[i] * opened
            elif e > 0:
                le_c[a, b] -= sw[i]
                le_o[a, b] -= sw[i] * opened
        seg = le_c - lt_c
        seg = seg + seg.T
        _vertical_segment_weights(self.S, pts, seg)
        return PairTables(pts[:, 0].copy(), le_o, le_c, lt_o, lt_c, seg, _point_weights(self.S, pts))


def _canonical(anchor) -> tuple:
    (px, py), (qx, qy) = anchor
    a, b = (float(px), float(py)), (float(qx), float(qy))
    return (a, b) if a <= b else (b, a)


def _canonical_rows(lines) -> np.ndarray:
    """Anchors as rows ``(ax, ay, bx, by)`` with ``a <= b`` lexicographically."""
    A = np.asarray(lines if isinstance(lines, np.ndarray) else list(lines), dtype=float).reshape(-1, 4)
    swap = (A[:, 0] > A[:, 2]) | ((A[:, 0] == A[:, 2]) & (A[:, 1] > A[:, 3]))
    A[swap] = A[swap][:, [2, 3, 0, 1]]
    return A + 0.0  # folds -0.0 into 0.0


class LineAnchoredIndex:
    """Exact discrepancy index over a registered family of lines.

    Build cost O(L |S| + |S| log |S|) time and O(L |S|) memory for ``L``
    registered lines; each edge query is two binary searches.
    """

    mode = "indexed"

    def __init__(self, S: LabeledPointSet, lines: Iterable[Anchor]):
        self.S = S
        m = len(S)
        order = np.lexsort((S.points[:, 1], S.points[:, 0]))
        self.sx = S.points[order, 0].copy()
        self.sy = S.points[order, 1].copy()
        sw = S.weights[order]
        A = _canonical_rows(lines)
        if len(A) and ((A[:, 0] == A[:, 2]) & (A[:, 1] == A[:, 3])).any():
            raise ValueError("a line needs two distinct anchor points")
        if len(A):
            _, first = np.unique(A, axis=0, return_index=True)
            A = A[np.sort(first)]
        self._key_cache: dict[tuple, int] | None = None
        L = len(A)
        self.anchors = A
        self.vertical = A[:, 0] == A[:, 2]
        dtype = np.int16 if m < 2 ** 15 else np.int32
        self.prefix = np.zeros((L, m + 1), dtype=dtype)
        r, c, ur, uc = _kernels.index_rows(A, self.vertical, self.sx, self.sy, sw.astype(np.int64), self.prefix)
        if len(ur):
            # settle cells the float filter could not decide (provisionally "on the line")
            drop = np.zeros(len(r), dtype=bool)
            on_pos = {(int(a_), int(b_)): t for t, (a_, b_) in enumerate(zip(r, c))}
            for l, i in zip(ur.tolist(), uc.tolist()):
                e = orientation(A[l, 0:2], A[l, 2:4], (self.sx[i], self.sy[i]))
                if e != 0:
                    drop[on_pos[(l, i)]] = True
                if e > 0:
                    self.prefix[l, i + 1:] -= dtype(sw[i])
            r, c = r[~drop], c[~drop]
        srt = np.lexsort((c, r))
        r, c = r[srt], c[srt]
        # on-line points keyed by (line, position) so one searchsorted serves all queries
        self._stride = m + 1
        self._on_key = r.astype(np.int64) * self._stride + c
        self._on_cum = np.concatenate([[0], np.cumsum(sw[c].astype(np.int64))])

    @property
    def n_lines(self) -> int:
        return len(self.anchors)

    @property
    def _key(self) -> dict[tuple, int]:
        if self._key_cache is None:
            self._key_cache = {((a, b), (c, d)): i for i, (a, b, c, d) in enumerate(self.anchors.tolist())}
        return self._key_cache

    def line_id(self, anchor) -> int:
        try:
            return self._key[_canonical(anchor)]
        except KeyError:
            raise UnregisteredLine(f"line through {anchor} was not registered") from None

    def _on_line_weight(self, lid, i0, i1) -> np.ndarray:
        base = lid * self._stride
        g0 = np.searchsorted(self._on_key, base + i0, "left")
        g1 = np.searchsorted(self._on_key, base + i1, "left")
        return self._on_cum[g1] - self._on_cum[g0]

    def edge_weights(self, lid, xlo, xhi, strict, closed_right) -> np.ndarray:
        """Weight below line ``lid`` over x in ``[xlo, xhi)`` (or ``]`` if closed_right).

        ``strict`` excludes points on the line.
        """
        lid = np.asarray(lid, dtype=np.int64)
        xlo = np.asarray(xlo, dtype=float)
        xhi = np.asarray(xhi, dtype=float)
        closed_right = np.asarray(closed_right, dtype=bool)
        strict = np.broadcast_to(np.asarray(strict, dtype=bool), lid.shape)
        i0 = np.searchsorted(self.sx, xlo, "left")
        i1 = np.where(closed_right, np.searchsorted(self.sx, xhi, "right"), np.searchsorted(self.sx, xhi, "left"))
        val = self.prefix[lid, i1].astype(np.int64) - self.prefix[lid, i0].astype(np.int64)
        if strict.any() and len(self._on_key):
            q = np.nonzero(strict)[0]
            val[q] -= self._on_line_weight(lid[q], i0[q], i1[q])
        return val

    def disc_batch_lines(self, vertices: np.ndarray, line_ids: np.ndarray) -> np.ndarray:
        """Discrepancy of ``T`` convex ``k``-gons given vertices ``(T, k, 2)``
        (counter-clockwise) and the registered line id of each edge ``(T, k)``."""
        V = np.asarray(vertices, dtype=float)
        ids = np.asarray(line_ids, dtype=np.int64)
        T, k = ids.shape
        out = np.zeros(T, dtype=np.int64)
        if T == 0 or len(self.sx) == 0:
            return out
        xmax = V[:, :, 0].max(axis=1)
        for e in range(k):
            x0, x1 = V[:, e, 0], V[:, (e + 1) % k, 0]
            upper = x1 < x0
            lower = x1 > x0
            if upper.any():
                u = np.nonzero(upper)[0]
                out[u] += self.edge_weights(ids[u, e], x1[u], x0[u], False, x0[u] == xmax[u])
            if lower.any():
                lo = np.nonzero(lower)[0]
                out[lo] -= self.edge_weights(ids[lo, e], x0[lo], x1[lo], True, x1[lo] == xmax[lo])
        return out

    def disc_polygon(self, P: ConvexPolygon) -> int:
        if len(self.sx) == 0:
            return 0
        ids = np.array([[self.line_id(P.edge_anchor(i)) for i in range(len(P))]])
        return int(self.disc_batch_lines(P.vertices[None, :, :], ids)[0])

    def disc_triangle(self, T: ConvexPolygon) -> int:
        if len(T) != 3:
            raise ValueError("expected a triangle")
        return self.disc_polygon(T)

    def pair_tables(self, pts) -> PairTables:
        """Edge-trapezoid tables for query points whose pairwise lines are registered."""
        pts = as_points(pts)
        n = len(pts)
        z = lambda: np.zeros((n, n), dtype=np.int64)  # noqa: E731
        le_o, le_c, lt_o, lt_c = z(), z(), z(), z()
        a_idx, b_idx = np.nonzero(pts[:, 0][:, None] < pts[:, 0][None, :])
        if len(a_idx):
            lids = np.fromiter(
                (self.line_id(((pts[a, 0], pts[a, 1]), (pts[b, 0], pts[b, 1]))) for a, b in zip(a_idx, b_idx)),
                dtype=np.int64, count=len(a_idx))
            xa, xb = pts[a_idx, 0], pts[b_idx, 0]
            le_o[a_idx, b_idx] = self.edge_weights(lids, xa, xb, False, False)
            le_c[a_idx, b_idx] = self.edge_weights(lids, xa, xb, False, True)
            lt_o[a_idx, b_idx] = self.edge_weights(lids, xa, xb, True, False)
            lt_c[a_idx, b_idx] = self.edge_weights(lids, xa, xb, True, True)
        seg = le_c - lt_c
        seg = seg + seg.T
        _vertical_segment_weights(self.S, pts, seg)
        return PairTables(pts[:, 0].copy(), le_o, le_c, lt_o, lt_c, seg, _point_weights(self.S, pts))


DiscrepancyCounter = ExhaustiveCounter | LineAnchoredIndex


def build_counter(S: LabeledPointSet, lines: Sequence[Anchor] | None = None,
                  mode: str = "exhaustive") -> ExhaustiveCounter | LineAnchoredIndex:
    """Counter bound to ``S``; ``mode`` is ``"exhaustive"`` or ``"indexed"``."""
    if mode == "exhaustive":
        return ExhaustiveCounter(S)
    if mode == "indexed":
        if lines is None:
            raise ValueError("indexed mode needs the family of supporting lines")
        return LineAnchoredIndex(S, lines)
    raise ValueError(f"unknown counter mode {mode!r}")


def pair_lines(points) -> np.ndarray:
    """Lines through every pair of distinct points, as an ``(L, 2, 2)`` anchor array."""
    pts = as_points(points)
    i, j = np.triu_indices(len(pts), k=1)
    keep = (pts[i, 0] != pts[j, 0]) | (pts[i, 1] != pts[j, 1])
    return np.stack([pts[i[keep]], pts[j[keep]]], axis=1)


def disc_polygon(counter, P: ConvexPolygon) -> int:
    return counter.disc_polygon(P)


def disc_triangle(counter, T: ConvexPolygon) -> int:
    return counter.disc_triangle(T)
