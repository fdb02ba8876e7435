"""Planar primitives: exact orientation, hulls, halfplane clipping, containment.

Polygons are closed sets throughout: a point on the boundary is inside.
Orientation signs are exact. The double-precision determinant is used when
its magnitude clears Shewchuk's forward error bound; otherwise the sign is
recomputed in rational arithmetic.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateHull

_EPS = np.finfo(float).eps / 2.0
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS

DEFAULT_BOX = 1.0e6

Point = tuple[float, float]
Anchor = tuple[Point, Point]


def _exact_sign(px, py, qx, qy, rx, ry) -> int:
    px, py, qx, qy, rx, ry = (Fraction(float(v)) for v in (px, py, qx, qy, rx, ry))
    det = (qx - px) * (ry - py) - (qy - py) * (rx - px)
    return (det > 0) - (det < 0)


def orientation(p: Sequence[float], q: Sequence[float], r: Sequence[float]) -> int:
    """Sign of (q - p) x (r - p): +1 counter-clockwise, 0 collinear, -1 clockwise."""
    px, py = float(p[0]), float(p[1])
    qx, qy = float(q[0]), float(q[1])
    rx, ry = float(r[0]), float(r[1])
    detl = (qx - px) * (ry - py)
    detr = (qy - py) * (rx - px)
    det = detl - detr
    bound = _CCW_ERRBOUND * (abs(detl) + abs(detr))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    if bound == 0.0 or (rx == px and ry == py) or (rx == qx and ry == qy):
        return 0
    return _exact_sign(px, py, qx, qy, rx, ry)


def orient_sign(px, py, qx, qy, rx, ry) -> np.ndarray:
    """Vectorised :func:`orientation` over broadcast coordinate arrays (int8)."""
    px, py, qx, qy, rx, ry = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (px, py, qx, qy, rx, ry)))
    detl = (qx - px) * (ry - py)
    detr = (qy - py) * (rx - px)
    det = detl - detr
    sign = np.sign(det).astype(np.int8)
    bound = _CCW_ERRBOUND * (np.abs(detl) + np.abs(detr))
    unsure = (np.abs(det) <= bound) & (bound > 0.0)
    # a point equal to either anchor is exactly on the line
    coincide = ((rx == px) & (ry == py)) | ((rx == qx) & (ry == qy))
    unsure &= ~coincide
    if sign.ndim == 0:
        if unsure:
            return np.int8(_exact_sign(px, py, qx, qy, rx, ry))
        return sign
    if unsure.any():
        for idx in zip(*np.nonzero(unsure)):
            sign[idx] = _exact_sign(px[idx], py[idx], qx[idx], qy[idx], rx[idx], ry[idx])
    return sign


def as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (m, 2) array of points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def shoelace_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True, eq=False)
class Halfplane:
    """Closed halfplane ``a . x <= b``.

    ``anchors`` (when set) is a directed pair ``(p, q)`` of points on the
    boundary line with the halfplane on the left of ``p -> q``.
    """

    a: tuple[float, float]
    b: float
    anchors: Anchor | None = None

    def __post_init__(self):
        if self.a[0] == 0.0 and self.a[1] == 0.0:
            raise ValueError("halfplane normal must be nonzero")

    @classmethod
    def left_of(cls, p: Sequence[float], q: Sequence[float]) -> "Halfplane":
        px, py, qx, qy = float(p[0]), float(p[1]), float(q[0]), float(q[1])
        a = (qy - py, -(qx - px))
        return cls(a, a[0] * px + a[1] * py, ((px, py), (qx, qy)))

    def flipped(self) -> "Halfplane":
        anchors = None if self.anchors is None else (self.anchors[1], self.anchors[0])
        return Halfplane((-self.a[0], -self.a[1]), -self.b, anchors)

    def contains(self, points) -> np.ndarray:
        pts = as_points(points)
        if self.anchors is not None:
            (px, py), (qx, qy) = self.anchors
            return orient_sign(px, py, qx, qy, pts[:, 0], pts[:, 1]) >= 0
        return pts @ np.asarray(self.a) <= self.b


class ConvexPolygon:
    """Strictly convex polygon with counter-clockwise vertices.

    ``lines`` optionally gives, per edge ``v[i] -> v[i+1]``, a directed anchor
    pair spanning the supporting line (interior on the left). ``None`` entries
    fall back to the edge's own endpoints.
    """

    __slots__ = ("vertices", "lines")

    def __init__(self, vertices, lines: Sequence[Anchor | None] | None = None, *, check: bool = True):
        v = as_points(vertices)
        if lines is not None:
            lines = tuple(lines)
            if len(lines) != len(v):
                raise ValueError("need one line anchor per edge")
        if check:
            k = len(v)
            if k < 3:
                raise ValueError("a convex polygon needs at least 3 vertices")
            nxt = np.roll(v, -1, axis=0)
            nxt2 = np.roll(v, -2, axis=0)
            turns = orient_sign(v[:, 0], v[:, 1], nxt[:, 0], nxt[:, 1], nxt2[:, 0], nxt2[:, 1])
            if not np.all(turns > 0):
                raise ValueError("vertices must be strictly convex and counter-clockwise")
        v.setflags(write=False)
        self.vertices = v
        self.lines = lines

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        pts = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in self.vertices)
        return f"ConvexPolygon([{pts}])"

    @property
    def area(self) -> float:
        return shoelace_area(self.vertices)

    def edge_anchor(self, i: int) -> Anchor:
        """Directed anchor pair of edge ``i`` (interior on its left)."""
        if self.lines is not None and self.lines[i] is not None:
            return self.lines[i]
        a = self.vertices[i]
        b = self.vertices[(i + 1) % len(self.vertices)]
        return (float(a[0]), float(a[1])), (float(b[0]), float(b[1]))

    def vertex_key(self, decimals: int = 9) -> tuple:
        """Rotation-invariant key for duplicate detection."""
        r = np.round(self.vertices, decimals) + 0.0
        start = min(range(len(r)), key=lambda i: (r[i, 0], r[i, 1]))
        return tuple(map(tuple, np.roll(r, -start, axis=0)))


def triangle(a, b, c, lines: Sequence[Anchor | None] | None = None) -> ConvexPolygon:
    """Triangle from three points in any order (reordered counter-clockwise)."""
    s = orientation(a, b, c)
    if s == 0:
        raise ValueError("degenerate triangle")
    if s < 0:
        if lines is not None:
            raise ValueError("line anchors given for a clockwise triangle")
        a, b = b, a
    return ConvexPolygon([a, b, c], lines)


def polygon_contains(poly: ConvexPolygon, points) -> np.ndarray:
    """Boundary-inclusive containment against every supporting line, O(q v)."""
    pts = as_points(points)
    inside = np.ones(len(pts), dtype=bool)
    for i in range(len(poly)):
        (px, py), (qx, qy) = poly.edge_anchor(i)
        inside &= orient_sign(px, py, qx, qy, pts[:, 0], pts[:, 1]) >= 0
    return inside


def points_in_polygon_mask(poly: ConvexPolygon, points) -> np.ndarray:
    """Boundary-inclusive containment by binary search over fan wedges.

    O((v + q) log v): each query point locates its wedge around vertex 0 with
    ``log v`` vectorised orientation rounds.
    """
    pts = as_points(points)
    q = len(pts)
    if q == 0:
        return np.zeros(0, dtype=bool)
    v = poly.vertices
    k = len(v)
    x, y = pts[:, 0], pts[:, 1]
    x0, y0 = v[0]
    ok = (orient_sign(x0, y0, v[1, 0], v[1, 1], x, y) >= 0) & \
         (orient_sign(x0, y0, v[k - 1, 0], v[k - 1, 1], x, y) <= 0)
    idx = np.nonzero(ok)[0]
    lo = np.ones(len(idx), dtype=np.int64)
    hi = np.full(len(idx), k - 2, dtype=np.int64)
    xs, ys = x[idx], y[idx]
    while True:
        active = lo < hi
        if not active.any():
            break
        mid = (lo + hi + 1) // 2
        s = orient_sign(x0, y0, v[mid, 0], v[mid, 1], xs, ys)
        go_up = active & (s >= 0)
        go_down = active & ~(s >= 0)
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_down, mid - 1, hi)
    a, b = v[lo], v[lo + 1]
    inner = orient_sign(a[:, 0], a[:, 1], b[:, 0], b[:, 1], xs, ys) >= 0
    mask = np.zeros(q, dtype=bool)
    mask[idx[inner]] = True
    return mask


def batch_points_in_polygon(poly: ConvexPolygon, points) -> np.ndarray:
    """The rows of ``points`` lying in the closed polygon."""
    pts = as_points(points)
    return pts[points_in_polygon_mask(poly, pts)]


def hull_indices(points) -> list[int]:
    """Indices of convex hull vertices (counter-clockwise, strictly convex).

    Andrew's monotone chain with exact orientation. Returns fewer than three
    indices when the input has < 3 distinct points or is collinear.
    """
    pts = as_points(points)
    if len(pts) == 0:
        return []
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    uniq = [int(order[0])]
    for i in order[1:]:
        if pts[i, 0] != pts[uniq[-1], 0] or pts[i, 1] != pts[uniq[-1], 1]:
            uniq.append(int(i))
    if len(uniq) < 3:
        return uniq
    P = [(float(pts[i, 0]), float(pts[i, 1])) for i in uniq]

    def chain(seq):
        out: list[int] = []
        for j in seq:
            while len(out) >= 2 and orientation(P[out[-2]], P[out[-1]], P[j]) <= 0:
                out.pop()
            out.append(j)
        return out

    lower = chain(range(len(P)))
    upper = chain(range(len(P) - 1, -1, -1))
    hull = lower[:-1] + upper[:-1]
    return [uniq[j] for j in hull]


def convex_hull(points) -> ConvexPolygon:
    """Smallest convex polygon containing ``points``.

    Raises :class:`DegenerateHull` for fewer than three distinct points or a
    collinear input.
    """
    pts = as_points(points)
    idx = hull_indices(pts)
    if len(idx) < 3:
        raise DegenerateHull("need at least three non-collinear points")
    return ConvexPolygon(pts[idx], check=False)


def closed_hull_contains(members, points) -> np.ndarray:
    """Containment in the closed hull of 0, 1, 2 or more member points."""
    mem = as_points(members)
    pts = as_points(points)
    idx = hull_indices(mem)
    if len(idx) >= 3:
        return points_in_polygon_mask(ConvexPolygon(mem[idx], check=False), pts)
    if len(idx) == 0:
        return np.zeros(len(pts), dtype=bool)
    a = mem[idx[0]]
    if len(idx) == 1:
        return (pts[:, 0] == a[0]) & (pts[:, 1] == a[1])
    b = mem[idx[-1]]
    on_line = orient_sign(a[0], a[1], b[0], b[1], pts[:, 0], pts[:, 1]) == 0
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    within = (pts[:, 0] >= lo[0]) & (pts[:, 0] <= hi[0]) & (pts[:, 1] >= lo[1]) & (pts[:, 1] <= hi[1])
    return on_line & within


def fan_triangulate(poly: ConvexPolygon) -> list[ConvexPolygon]:
    """Triangles ``(v0, vi, vi+1)``; polygon edges keep their line anchors."""
    v = poly.vertices
    k = len(v)
    out = []
    for i in range(1, k - 1):
        lines = None
        if poly.lines is not None:
            lines = (poly.lines[0] if i == 1 else None,
                     poly.lines[i],
                     poly.lines[k - 1] if i + 1 == k - 1 else None)
        out.append(ConvexPolygon([v[0], v[i], v[i + 1]], lines, check=False))
    return out


class Region(enum.Enum):
    EMPTY = "empty"
    UNBOUNDED = "unbounded"


def _line_intersection(h1: Halfplane, h2: Halfplane) -> tuple[float, float] | None:
    a1, b1, a2, b2 = h1.a, h1.b, h2.a, h2.b
    det = a1[0] * a2[1] - a1[1] * a2[0]
    if det == 0.0:
        return None
    x = (b1 * a2[1] - a1[1] * b2) / det
    y = (a1[0] * b2 - b1 * a2[0]) / det
    return x, y


def halfplane_intersection(hs: Sequence[Halfplane], box: float = DEFAULT_BOX) -> ConvexPolygon | Region:
    """Intersect closed halfplanes by incremental clipping of a bounding box.

    Returns a :class:`ConvexPolygon` (at most ``len(hs)`` edges, each carrying
    its halfplane's anchors), ``Region.EMPTY`` (no interior) or
    ``Region.UNBOUNDED`` (the clipped region still touches the box).
    """
    verts = [(-box, -box), (box, -box), (box, box), (-box, box)]
    labels = [-1, -1, -1, -1]
    for hi, h in enumerate(hs):
        ax, ay = h.a
        scale = abs(ax) * box + abs(ay) * box + abs(h.b)
        tol = 1e-13 * scale
        s = [ax * x + ay * y - h.b for x, y in verts]
        s = [0.0 if abs(val) <= tol else val for val in s]
        if all(val <= 0.0 for val in s):
            continue
        if all(val >= 0.0 for val in s):
            return Region.EMPTY
        nv, nl = [], []
        m = len(verts)
        for i in range(m):
            j = (i + 1) % m
            (cx, cy), (nx, ny) = verts[i], verts[j]
            sc, sn = s[i], s[j]
            if sc <= 0.0:
                nv.append((cx, cy))
                if sn <= 0.0:
                    nl.append(labels[i])
                elif sc == 0.0:
                    nl.append(hi)
                else:
                    t = sc / (sc - sn)
                    nl.append(labels[i])
                    nv.append((cx + t * (nx - cx), cy + t * (ny - cy)))
                    nl.append(hi)
            elif sn < 0.0:
                t = sc / (sc - sn)
                nv.append((cx + t * (nx - cx), cy + t * (ny - cy)))
                nl.append(labels[i])
        verts, labels = nv, nl
        if len(verts) < 3:
            return Region.EMPTY
    if any(lab == -1 for lab in labels):
        return Region.UNBOUNDED
    # Drop edges whose label repeats (collinear pieces) and recompute each
    # vertex as the intersection of its two supporting lines.
    m = len(labels)
    keep = [labels[i] != labels[i - 1] for i in range(m)]
    edge_labels = [labels[i] for i in range(m) if keep[i]]
    k = len(edge_labels)
    if k < 3:
        return Region.EMPTY
    pts = []
    for i in range(k):
        p = _line_intersection(hs[edge_labels[i - 1]], hs[edge_labels[i]])
        if p is None:
            return Region.EMPTY
        pts.append(p)
    arr = np.asarray(pts)
    span = float(np.max(np.abs(arr))) + 1.0
    cleaned, clabels = [], []
    for i in range(k):
        if cleaned and np.hypot(*(arr[i] - cleaned[-1])) <= 1e-12 * span:
            clabels[-1] = edge_labels[i]
            continue
        cleaned.append(arr[i])
        clabels.append(edge_labels[i])
    if len(cleaned) > 1 and np.hypot(*(cleaned[0] - cleaned[-1])) <= 1e-12 * span:
        cleaned.pop()
        clabels.pop()
    if len(cleaned) < 3:
        return Region.EMPTY
    # vertex i sits between edges clabels[i-1] and clabels[i]; edge i runs v[i] -> v[i+1]
    lines = [hs[lab].anchors for lab in clabels]
    anchors = None if any(a is None for a in lines) else lines
    try:
        return ConvexPolygon(np.asarray(cleaned), anchors)
    except ValueError:
        return Region.EMPTY


def check_general_position(points) -> list[tuple[int, int, int]]:
    """Collinear triples (and duplicates, reported as ``(i, j, j)``).

    O(n^2 log n): around each point the other points are sorted by direction
    modulo pi and only near-equal neighbours are checked exactly.
    """
    pts = as_points(points)
    n = len(pts)
    bad: list[tuple[int, int, int]] = []
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    sp = pts[order]
    dup = np.nonzero((sp[1:, 0] == sp[:-1, 0]) & (sp[1:, 1] == sp[:-1, 1]))[0]
    for d in dup:
        bad.append((int(order[d]), int(order[d + 1]), int(order[d + 1])))
    if bad:
        return bad
    for i in range(n):
        others = np.delete(np.arange(n), i)
        if len(others) < 2:
            break
        d = pts[others] - pts[i]
        ang = np.mod(np.arctan2(d[:, 1], d[:, 0]), np.pi)
        srt = np.argsort(ang)
        a_sorted = ang[srt]
        # wrap-around: angles near 0 and near pi are the same direction
        gaps = np.diff(np.concatenate([a_sorted, a_sorted[:1] + np.pi]))
        close = np.nonzero(gaps <= 1e-9)[0]
        for c in close:
            j = int(others[srt[c]])
            k = int(others[srt[(c + 1) % len(srt)]])
            if j != k and orientation(pts[i], pts[j], pts[k]) == 0:
                t = tuple(sorted((i, j, k)))
                if t not in bad:
                    bad.append(t)
    return bad


def lexicographic_order(points: Iterable) -> np.ndarray:
    pts = as_points(points)
    return np.lexsort((pts[:, 1], pts[:, 0]))
