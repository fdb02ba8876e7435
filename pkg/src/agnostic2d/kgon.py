"""Approximate empirical risk minimisation over k-gons.

A net ``N`` is drawn from the sample; every line through two distinct net
points induces two closed halfplanes. The candidate family ("reference
k-gons") is every bounded intersection of ``k`` induced halfplanes, and the
learner returns the candidate of largest discrepancy.

Halfplane ``2*l`` is the left side of line ``l`` (directed along its anchor
pair) and ``2*l + 1`` the right side. Ties are broken towards the
lexicographically smallest sorted halfplane index tuple.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .disc import ExhaustiveCounter, LabeledPointSet, LineAnchoredIndex
from .errors import EmptyReferenceSet, EmptySample, InstanceTooLarge, TooFewPoints
from .geom import ConvexPolygon, Halfplane, Region, as_points, halfplane_intersection, orient_sign

_LOGS = {"e": math.log, "2": math.log2, "10": math.log10}

ORACLE_GUARD = {3: 25, 4: 10}
ORACLE_GUARD_DEFAULT = 8


def net_size(eps: float, k: int, c: float | None = None, log_base: str = "e", delta0: float = 1 / 3) -> int:
    """Net size for the k-gon learner.

    With ``c`` given: ``ceil(c * k * log(k) / eps)`` in the chosen log base.
    Without: ``ceil((4k/eps) ln(2k/delta0))``, enough for every target k-gon
    to have an ``eps``-close reference k-gon with probability ``1 - delta0``.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if k < 3:
        raise ValueError("k must be at least 3")
    if c is None:
        return math.ceil(4 * k / eps * math.log(2 * k / delta0))
    return math.ceil(c * k * _LOGS[log_base](k) / eps)


@dataclass
class NetSample:
    """Net points drawn with replacement from a sample's points."""

    points: np.ndarray
    indices: np.ndarray

    @property
    def n(self) -> int:
        return len(self.points)

    def distinct(self) -> np.ndarray:
        """Distinct net points in lexicographic (x, y) order."""
        return np.unique(self.points, axis=0)


def sample_net(S: LabeledPointSet, n: int, rng: np.random.Generator, attempts: int = 10) -> NetSample:
    if len(S) == 0:
        raise EmptySample("cannot draw a net from an empty sample")
    for _ in range(attempts):
        idx = rng.integers(0, len(S), size=n)
        pts = S.points[idx]
        if len(np.unique(pts, axis=0)) >= 2:
            return NetSample(pts, idx)
    raise TooFewPoints(f"net has fewer than two distinct points after {attempts} draws")


@dataclass
class InducedLines:
    """Distinct lines through pairs of net points.

    ``anchors[l]`` holds ``(px, py, qx, qy)`` for the two lowest-indexed
    points on line ``l``; ``on[l]`` marks every point lying on it.
    """

    points: np.ndarray
    anchors: np.ndarray
    pairs: np.ndarray
    on: np.ndarray

    def __len__(self) -> int:
        return len(self.anchors)

    def anchor_pairs(self) -> list:
        return [((a[0], a[1]), (a[2], a[3])) for a in self.anchors.tolist()]

    def halfplanes(self) -> list[Halfplane]:
        out = []
        for (p, q) in self.anchor_pairs():
            h = Halfplane.left_of(p, q)
            out.extend([h, h.flipped()])
        return out


def induced_lines(points) -> InducedLines:
    pts = np.unique(as_points(points), axis=0)
    n = len(pts)
    if n < 2:
        raise TooFewPoints("need at least two distinct points")
    x, y = pts[:, 0], pts[:, 1]
    anchors, pairs, on_rows = [], [], []
    for i in range(n - 1):
        js = np.arange(i + 1, n)
        sign = orient_sign(x[i], y[i], x[js][:, None], y[js][:, None], x[None, :], y[None, :])
        zero = sign == 0
        for r, j in enumerate(js):
            row = zero[r]
            # keep the pair only if no other point with a smaller index than j is on the line
            row_before = row[:j].copy()
            row_before[i] = False
            if row_before.any():
                continue
            anchors.append((x[i], y[i], x[j], y[j]))
            pairs.append((i, j))
            on_rows.append(row)
    return InducedLines(pts, np.asarray(anchors, dtype=float).reshape(-1, 4),
                        np.asarray(pairs, dtype=np.int64).reshape(-1, 2),
                        np.asarray(on_rows, dtype=bool).reshape(-1, n))


def induced_halfplanes(points) -> list[Halfplane]:
    """Both closed sides of every distinct line through two distinct points."""
    return induced_lines(points).halfplanes()


@dataclass
class ReferenceKGon:
    polygon: ConvexPolygon
    halfplanes: tuple[int, ...]
    disc: int | None = None


@dataclass
class EnumerationStats:
    examined: int = 0
    bounded: int = 0
    yielded: int = 0


def enumerate_reference_kgons(halfplanes: Sequence[Halfplane], k: int,
                             stats: EnumerationStats | None = None,
                             decimals: int = 9) -> Iterator[ReferenceKGon]:
    """Stream distinct bounded intersections of ``k`` halfplanes.

    Tuples are visited in lexicographic index order. Polygons are
    deduplicated by rounded vertex lists, keeping the first tuple.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    st = stats if stats is not None else EnumerationStats()
    line_of = [(_line_key(h)) for h in halfplanes]
    seen: set = set()
    for combo in itertools.combinations(range(len(halfplanes)), k):
        st.examined += 1
        keys = [line_of[i] for i in combo]
        if len(set(keys)) < k and _has_opposite_pair(combo, halfplanes, line_of):
            continue
        P = halfplane_intersection([halfplanes[i] for i in combo])
        if isinstance(P, Region):
            continue
        st.bounded += 1
        key = P.vertex_key(decimals)
        if key in seen:
            continue
        seen.add(key)
        st.yielded += 1
        yield ReferenceKGon(P, combo)


def _line_key(h: Halfplane):
    if h.anchors is None:
        return None
    (px, py), (qx, qy) = h.anchors
    a, b = (px, py), (qx, qy)
    return (a, b) if a <= b else (b, a)


def _has_opposite_pair(combo, halfplanes, line_of) -> bool:
    # two closed sides of one line meet only in that line: no interior
    for a, b in itertools.combinations(combo, 2):
        if line_of[a] is not None and line_of[a] == line_of[b]:
            ha, hb = halfplanes[a], halfplanes[b]
            if ha.a[0] * hb.a[0] + ha.a[1] * hb.a[1] < 0:
                return True
    return False


def _pairwise_intersections(lines: InducedLines) -> tuple[np.ndarray, np.ndarray]:
    """Intersection point of every pair of lines, snapped to a shared net point.

    Returns ``V`` of shape ``(L, L, 2)`` and a boolean ``parallel`` mask.
    """
    A = lines.anchors
    px, py = A[:, 0], A[:, 1]
    dx, dy = A[:, 2] - px, A[:, 3] - py
    cross = dx[:, None] * dy[None, :] - dy[:, None] * dx[None, :]
    parallel = cross == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        wx = px[None, :] - px[:, None]
        wy = py[None, :] - py[:, None]
        t = (wx * dy[None, :] - wy * dx[None, :]) / cross
        V = np.stack([px[:, None] + t * dx[:, None], py[:, None] + t * dy[:, None]], axis=-1)
    # exact vertices where two lines share a net point
    on = lines.on.astype(np.uint8)
    shared = (on @ on.T) > 0
    np.fill_diagonal(shared, False)
    ii, jj = np.nonzero(shared & ~parallel)
    if len(ii):
        common = np.argmax(lines.on[ii] & lines.on[jj], axis=1)
        V[ii, jj] = lines.points[common]
    V[parallel] = np.nan
    return V, parallel


@dataclass
class TriangleBatch:
    """Bounded triangles from line triples ``(l1, l2, l3)``, counter-clockwise."""

    vertices: np.ndarray
    line_ids: np.ndarray
    halfplanes: np.ndarray
    flips: np.ndarray


def _triangles_for_first_line(l1: int, V: np.ndarray, parallel: np.ndarray, A: np.ndarray) -> TriangleBatch:
    L = len(A)
    rest = np.arange(l1 + 1, L)
    if len(rest) < 2:
        return TriangleBatch(np.zeros((0, 3, 2)), np.zeros((0, 3), np.int64), np.zeros((0, 3), np.int64),
                             np.zeros((0, 3), bool))
    l2, l3 = np.triu_indices(len(rest), k=1)
    l2, l3 = rest[l2], rest[l3]
    ok = ~(parallel[l1, l2] | parallel[l1, l3] | parallel[l2, l3])
    l2, l3 = l2[ok], l3[ok]
    a, b, c = V[l1, l2], V[l1, l3], V[l2, l3]
    span = np.max(np.abs(np.concatenate([a, b, c], axis=1)), axis=1) + 1.0
    tol = 1e-12 * span
    distinct = (np.hypot(*(a - b).T) > tol) & (np.hypot(*(a - c).T) > tol) & (np.hypot(*(b - c).T) > tol)
    s = orient_sign(a[:, 0], a[:, 1], b[:, 0], b[:, 1], c[:, 0], c[:, 1])
    keep = distinct & (s != 0)
    l2, l3, a, b, c, s = l2[keep], l3[keep], a[keep], b[keep], c[keep], s[keep]
    ccw = s > 0
    # ccw: a -> b (l1), b -> c (l3), c -> a (l2); otherwise a -> c (l2), c -> b (l3), b -> a (l1)
    verts = np.where(ccw[:, None, None], np.stack([a, b, c], 1), np.stack([a, c, b], 1))
    l1v = np.full(len(l2), l1)
    ids = np.where(ccw[:, None], np.stack([l1v, l3, l2], 1), np.stack([l2, l3, l1v], 1))
    nxt = np.roll(verts, -1, axis=1)
    d = A[ids]
    along = (nxt[..., 0] - verts[..., 0]) * (d[..., 2] - d[..., 0]) + \
            (nxt[..., 1] - verts[..., 1]) * (d[..., 3] - d[..., 1])
    flips = along < 0  # interior on the right of the anchor direction
    hp = 2 * ids + flips.astype(np.int64)
    hp_sorted = np.take_along_axis(hp, np.argsort(ids, axis=1), axis=1)
    return TriangleBatch(verts, ids, hp_sorted, flips)


def _directed_anchors(A: np.ndarray, ids: np.ndarray, flips: np.ndarray) -> np.ndarray:
    d = A[ids].copy()
    f = flips
    d[f] = d[f][:, [2, 3, 0, 1]]
    return d


def _polygon_from(verts: np.ndarray, A: np.ndarray, ids: np.ndarray, flips: np.ndarray) -> ConvexPolygon:
    d = _directed_anchors(A, ids, flips)
    lines = [((r[0], r[1]), (r[2], r[3])) for r in d.tolist()]
    return ConvexPolygon(verts, lines)


def _erm_triangles(S: LabeledPointSet, lines: InducedLines, mode: str) -> ReferenceKGon:
    A = lines.anchors
    V, parallel = _pairwise_intersections(lines)
    if mode == "indexed":
        counter = LineAnchoredIndex(S, lines.anchor_pairs())
        if counter.n_lines != len(A):
            raise AssertionError("induced lines must be distinct")
    else:
        counter = ExhaustiveCounter(S)
    best = None
    best_disc = None
    for l1 in range(len(A) - 2):
        tb = _triangles_for_first_line(l1, V, parallel, A)
        if len(tb.vertices) == 0:
            continue
        if mode == "indexed":
            d = counter.disc_batch_lines(tb.vertices, tb.line_ids)
        else:
            d = counter.disc_batch(_directed_anchors(A, tb.line_ids, tb.flips))
        # rows come in lexicographic (l2, l3) order, matching the halfplane-tuple order
        i = int(np.argmax(d))
        if best_disc is None or d[i] > best_disc:
            best_disc = int(d[i])
            best = (tb.vertices[i], tb.line_ids[i], tb.flips[i], tuple(int(h) for h in tb.halfplanes[i]))
    if best is None:
        raise EmptyReferenceSet("no bounded triangle among the induced halfplanes")
    verts, ids, flips, hp = best
    return ReferenceKGon(_polygon_from(verts, A, ids, flips), hp, best_disc)


def _erm_generic(S: LabeledPointSet, lines: InducedLines, k: int, mode: str) -> ReferenceKGon:
    hs = lines.halfplanes()
    if mode == "indexed":
        counter = LineAnchoredIndex(S, lines.anchor_pairs())
    else:
        counter = ExhaustiveCounter(S)
    best: ReferenceKGon | None = None
    for r in enumerate_reference_kgons(hs, k):
        r.disc = counter.disc_polygon(r.polygon)
        if best is None or r.disc > best.disc:
            best = r
    if best is None:
        raise EmptyReferenceSet(f"no bounded {k}-gon among the induced halfplanes")
    return best


@dataclass
class KGonResult:
    """Learner output with the net and the size of the reference family."""

    best: ReferenceKGon
    net: NetSample
    lines: InducedLines = field(repr=False)

    @property
    def polygon(self) -> ConvexPolygon:
        return self.best.polygon

    @property
    def disc(self) -> int:
        return int(self.best.disc)


def approximate_erm_kgon(S: LabeledPointSet, eps: float, k: int, c: float | None = None,
                         rng: np.random.Generator | int | None = None, *, n: int | None = None,
                         net: NetSample | None = None, mode: str = "indexed",
                         log_base: str = "e") -> KGonResult:
    """Reference k-gon of maximum discrepancy on ``S``.

    The net is drawn from ``S`` (size from :func:`net_size` unless ``n`` is
    given) or supplied directly via ``net``. Counting uses the line-anchored
    index by default; ``mode="exhaustive"`` scans the sample instead.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    if len(S) == 0:
        raise EmptySample("cannot learn from an empty sample")
    if net is None:
        rng = np.random.default_rng(rng)
        size = n if n is not None else net_size(eps, k, c, log_base)
        net = sample_net(S, size, rng)
    lines = induced_lines(net.points)
    if k == 3:
        best = _erm_triangles(S, lines, mode)
    else:
        best = _erm_generic(S, lines, k, mode)
    return KGonResult(best, net, lines)


def exact_erm_oracle(S: LabeledPointSet, k: int = 3) -> ReferenceKGon:
    """Maximum-discrepancy bounded intersection of ``k`` halfplanes whose
    lines pass through two sample points.

    Brute force with direct containment counting; meant for ground truth on
    small samples only.
    """
    guard = ORACLE_GUARD.get(k, ORACLE_GUARD_DEFAULT)
    if len(S) > guard:
        raise InstanceTooLarge(f"oracle for k={k} is limited to {guard} examples")
    if len(S) == 0:
        raise EmptySample("empty sample")
    pts = np.unique(S.points, axis=0)
    if len(pts) < 2:
        raise TooFewPoints("need at least two distinct points")
    if k != 3:
        hs = induced_halfplanes(pts)
        counter = ExhaustiveCounter(S)
        best = None
        for r in enumerate_reference_kgons(hs, k):
            r.disc = counter.disc_polygon(r.polygon)
            if best is None or r.disc > best.disc:
                best = r
        if best is None:
            raise EmptyReferenceSet(f"no bounded {k}-gon")
        return best
    return _triangle_oracle(S, pts)


def _triangle_oracle(S: LabeledPointSet, pts: np.ndarray) -> ReferenceKGon:
    # every pair line, coincident ones merged by exact collinearity
    lines = []
    for i, j in itertools.combinations(range(len(pts)), 2):
        p, q = pts[i], pts[j]
        if any(orient_sign(a[0], a[1], a[2], a[3], p[0], p[1]) == 0 and
               orient_sign(a[0], a[1], a[2], a[3], q[0], q[1]) == 0 for a in lines):
            continue
        lines.append((p[0], p[1], q[0], q[1]))
    A = np.asarray(lines, dtype=float).reshape(-1, 4)
    L = len(A)
    w = S.weights
    # side of every sample point w.r.t. every line, exact
    sg = orient_sign(A[:, 0:1], A[:, 1:2], A[:, 2:3], A[:, 3:4], S.points[:, 0], S.points[:, 1]).astype(np.int8)
    if L < 3:
        raise EmptyReferenceSet("fewer than three distinct lines")
    tri = np.array(list(itertools.combinations(range(L), 3)), dtype=np.int64)
    # lines in homogeneous form: (a, b, c) with a x + b y + c = 0
    hom = np.column_stack([A[:, 3] - A[:, 1], A[:, 0] - A[:, 2], A[:, 2] * A[:, 1] - A[:, 0] * A[:, 3]])

    def meet(i, j):
        h = np.cross(hom[i], hom[j])
        with np.errstate(divide="ignore", invalid="ignore"):
            return h[:, :2] / h[:, 2:3], h[:, 2]

    best_d, best_t = None, None
    for s in range(0, len(tri), 200_000):
        t = tri[s:s + 200_000]
        (p12, z12), (p13, z13), (p23, z23) = meet(t[:, 0], t[:, 1]), meet(t[:, 0], t[:, 2]), meet(t[:, 1], t[:, 2])
        area2 = np.abs((p13[:, 0] - p12[:, 0]) * (p23[:, 1] - p12[:, 1]) -
                       (p13[:, 1] - p12[:, 1]) * (p23[:, 0] - p12[:, 0]))
        ok = (z12 != 0) & (z13 != 0) & (z23 != 0) & np.isfinite(area2) & (area2 > 1e-20)
        t, p12, p13, p23 = t[ok], p12[ok], p13[ok], p23[ok]
        if len(t) == 0:
            continue
        inside = np.ones((len(t), len(w)), dtype=bool)
        sides = []
        for e, opp in ((0, p23), (1, p13), (2, p12)):
            a = A[t[:, e]]
            side = orient_sign(a[:, 0], a[:, 1], a[:, 2], a[:, 3], opp[:, 0], opp[:, 1]).astype(np.int8)
            sides.append(side)
            inside &= (side[:, None] * sg[t[:, e]]) >= 0
        d = inside.astype(np.int64) @ w
        i = int(np.argmax(d))
        if best_d is None or d[i] > best_d:
            best_d = int(d[i])
            best_t = (t[i], [int(sd[i]) for sd in sides])
    if best_t is None:
        raise EmptyReferenceSet("no bounded triangle")
    ids, sides = best_t
    hs = []
    hp_idx = []
    for lid, sd in zip(ids, sides):
        h = Halfplane.left_of((A[lid, 0], A[lid, 1]), (A[lid, 2], A[lid, 3]))
        hs.append(h if sd > 0 else h.flipped())
        hp_idx.append(2 * int(lid) + (0 if sd > 0 else 1))
    P = halfplane_intersection(hs)
    if isinstance(P, Region):
        raise EmptyReferenceSet("degenerate optimum")
    return ReferenceKGon(P, tuple(hp_idx), best_d)
