"""Maximum-discrepancy islands of a net and the convex-set learner built on them.

An island of a net ``N`` is a subset ``I`` with ``Hull(I) ∩ N = I``. For a
net in general position every island with three or more members is
``N ∩ P`` for a convex polygon ``P`` whose vertices are net points, and every
such polygon gives an island. The search therefore runs over convex
polygons with vertices in ``N``:

* For each candidate bottom vertex ``p`` (lowest, then leftmost), the other
  vertices are the points above it, ranked by angle around ``p``.
* A chain ``p -> v1 -> ... -> vk`` is convex exactly when its edge
  directions increase; closing back to ``p`` is then automatic.
* The value of the polygon is the sum of its fan triangles ``(p, vi, vi+1)``
  minus the weight on each interior diagonal ``p vi`` (counted twice by
  the closed triangles).
* All directed net edges are sorted by direction once. Per bottom vertex a
  single sweep over that list scores each edge ``u -> v`` from the best
  chain already ending at ``u``, so the whole search is O(n^3) after an
  O(n^2 log n) sort.

Triangle weights come from per-pair edge-trapezoid tables (see
:class:`agnostic2d.disc.PairTables`), so a triangle value costs O(1).
Scores are ``(n + 1) * disc - members``: maximum discrepancy first, then
fewest net points covered.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .disc import ExhaustiveCounter, LabeledPointSet, LineAnchoredIndex, PairTables, pair_lines
from .errors import CollinearNet, InstanceTooLarge
from .geom import (
    ConvexPolygon,
    as_points,
    check_general_position,
    closed_hull_contains,
    hull_indices,
    points_in_polygon_mask,
)

ISLAND_ORACLE_GUARD = 14
VALTR_LAMBDA = 7.0


def sample_uniform_net(n: int, rng) -> np.ndarray:
    """``n`` independent uniform points in the unit square."""
    if n < 3:
        raise ValueError("a net needs at least 3 points")
    return np.random.default_rng(rng).random((n, 2))


@dataclass
class Island:
    """Island of a net: sorted member indices, hull vertex indices (CCW) and discrepancy."""

    members: tuple[int, ...]
    vertices: tuple[int, ...]
    hull: ConvexPolygon | None
    disc: int

    @property
    def size(self) -> int:
        return len(self.members)


class TriangleDiscTable:
    """Discrepancy of every net triangle, answered in O(1) from pair tables.

    ``value(a, b, c)`` equals the closed-triangle discrepancy; ``as_array``
    materialises all ``n^3`` ordered entries (zero on degenerate triples).
    """

    def __init__(self, net: np.ndarray, tables: PairTables):
        self.net = as_points(net)
        self.tables = tables

    @property
    def n(self) -> int:
        return len(self.net)

    def value(self, a: int, b: int, c: int) -> int:
        x, y = self.net[:, 0], self.net[:, 1]
        t = self.tables
        return int(_tri_value(a, b, c, x, y, t.le_open, t.le_closed, t.lt_open, t.lt_closed))

    def as_array(self) -> np.ndarray:
        t = self.tables
        return _all_triangles(self.net[:, 0].copy(), self.net[:, 1].copy(),
                              t.le_open, t.le_closed, t.lt_open, t.lt_closed)


def build_triangle_table(net, counter) -> TriangleDiscTable:
    """Triangle discrepancy table for ``net``.

    With a :class:`LineAnchoredIndex`, every line through two net points must
    be registered.
    """
    net = as_points(net)
    return TriangleDiscTable(net, counter.pair_tables(net))


def net_counter(S: LabeledPointSet, net, mode: str = "indexed"):
    """Counter for ``S`` with every net-pair line registered (indexed mode)."""
    if mode == "indexed":
        return LineAnchoredIndex(S, pair_lines(net))
    if mode == "exhaustive":
        return ExhaustiveCounter(S)
    raise ValueError(f"unknown counter mode {mode!r}")


# ---------------------------------------------------------------- kernels

@njit(cache=True)
def _edge_value(a, b, xmax, x, le_o, le_c, lt_o, lt_c):
    xa = x[a]
    xb = x[b]
    if xb < xa:  # upper chain: closed region below the edge
        return le_c[b, a] if xa == xmax else le_o[b, a]
    if xb > xa:  # lower chain: open region below the edge, subtracted
        return -(lt_c[a, b] if xb == xmax else lt_o[a, b])
    return 0


@njit(cache=True)
def _tri_ccw(a, b, c, x, le_o, le_c, lt_o, lt_c):
    xmax = max(x[a], max(x[b], x[c]))
    return (_edge_value(a, b, xmax, x, le_o, le_c, lt_o, lt_c)
            + _edge_value(b, c, xmax, x, le_o, le_c, lt_o, lt_c)
            + _edge_value(c, a, xmax, x, le_o, le_c, lt_o, lt_c))


@njit(cache=True)
def _tri_value(a, b, c, x, y, le_o, le_c, lt_o, lt_c):
    det = (x[b] - x[a]) * (y[c] - y[a]) - (y[b] - y[a]) * (x[c] - x[a])
    if det > 0:
        return _tri_ccw(a, b, c, x, le_o, le_c, lt_o, lt_c)
    if det < 0:
        return _tri_ccw(a, c, b, x, le_o, le_c, lt_o, lt_c)
    return 0


@njit(cache=True)
def _all_triangles(x, y, le_o, le_c, lt_o, lt_c):
    n = len(x)
    out = np.zeros((n, n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                v = _tri_value(a, b, c, x, y, le_o, le_c, lt_o, lt_c)
                out[a, b, c] = v
                out[a, c, b] = v
                out[b, a, c] = v
                out[b, c, a] = v
                out[c, a, b] = v
                out[c, b, a] = v
    return out


_NEG = -(2 ** 62)


def _edge_table(x, le_o, le_c, lt_o, lt_c) -> np.ndarray:
    """``E[a, b, c]``: signed trapezoid weight of the directed edge ``a -> b``,
    with ``c = 1`` when the edge reaches the polygon's rightmost x (closed end)."""
    xa, xb = x[:, None], x[None, :]
    upper, lower = xb < xa, xb > xa
    E = np.zeros(le_o.shape + (2,), dtype=np.int64)
    E[..., 0] = np.where(upper, le_o.T, 0) - np.where(lower, lt_o, 0)
    E[..., 1] = np.where(upper, le_c.T, 0) - np.where(lower, lt_c, 0)
    return E


@njit(cache=True)
def _tri_edges(a, b, c, x, E):
    xa = x[a]
    xb = x[b]
    xc = x[c]
    xm = max(xa, max(xb, xc))
    return (E[a, b, 1 if max(xa, xb) == xm else 0]
            + E[b, c, 1 if max(xb, xc) == xm else 0]
            + E[c, a, 1 if max(xc, xa) == xm else 0])


def _edges_by_direction(x: np.ndarray, y: np.ndarray):
    """All ordered pairs ``u -> v`` sorted by direction angle in [0, 2 pi)."""
    n = len(x)
    u, v = np.nonzero(~np.eye(n, dtype=bool))
    d = np.arctan2(y[v] - y[u], x[v] - x[u])
    d = np.where(d < 0.0, d + 2.0 * np.pi, d)
    o = np.argsort(d, kind="stable")
    return u[o].astype(np.int64), v[o].astype(np.int64), d[o]


@njit(cache=True)
def _angular_rank(p, x, y):
    n = len(x)
    m = n - p - 1
    theta = np.empty(m)
    for t in range(m):
        theta[t] = math.atan2(y[p + 1 + t] - y[p], x[p + 1 + t] - x[p])
    rank = np.full(n, -1, dtype=np.int64)
    o = np.argsort(theta)
    for r in range(m):
        rank[p + 1 + o[r]] = r
    return rank


@njit(cache=True)
def _chain_sweep(p, eu, ev, ed, ne, x, y, E, seg, unit, trace, pred):
    """Convex-chain DP for bottom vertex ``p`` in one pass over the edges.

    Edges are visited in increasing direction, so when ``u -> v`` is reached
    every admissible predecessor edge ``h -> u`` (strictly smaller direction)
    has been scored; ``end[u]`` holds the best of them. Edges of equal
    direction are scored before any of them updates ``end``. With ``unit``
    set the score is the vertex count instead of the weight.
    """
    n = len(x)
    rank = _angular_rank(p, x, y)
    end = np.full(n, _NEG, dtype=np.int64)
    arg = np.full(n, -1, dtype=np.int64)
    gv = np.empty(ne, dtype=np.int64)
    best = _NEG
    bu = -1
    bv = -1
    g0 = 0
    while g0 < ne:
        g1 = g0 + 1
        while g1 < ne and ed[g1] == ed[g0]:
            g1 += 1
        for e in range(g0, g1):
            u = eu[e]
            v = ev[e]
            if rank[u] >= rank[v]:
                gv[e] = _NEG
                continue
            if unit:
                val = 3
                if end[u] > _NEG and end[u] + 1 > val:
                    val = end[u] + 1
            else:
                base = 0
                if end[u] > _NEG:
                    ext = end[u] - seg[p, u]
                    if ext > 0:
                        base = ext
                val = _tri_edges(p, u, v, x, E) + base
            if trace:
                pred[u, v] = arg[u] if (unit or base > 0) else -1
            gv[e] = val
            if val > best:
                best = val
                bu = u
                bv = v
        for e in range(g0, g1):
            if gv[e] > end[ev[e]]:
                end[ev[e]] = gv[e]
                arg[ev[e]] = eu[e]
        g0 = g1
    return best, bu, bv


@njit(cache=True)
def _drop_vertex(p, eu, ev, ed, ne):
    """Remove edges touching ``p`` in place, keeping direction order."""
    k = 0
    for e in range(ne):
        if eu[e] != p and ev[e] != p:
            eu[k] = eu[e]
            ev[k] = ev[e]
            ed[k] = ed[e]
            k += 1
    return k


@njit(cache=True)
def _best_polygon(x, y, eu, ev, ed, E, seg, unit):
    """Best (score, bottom vertex) over all bottom vertices; consumes the edge arrays."""
    best = _NEG
    bp = -1
    ne = len(eu)
    dummy = np.zeros((1, 1), np.int64)
    for p in range(len(x) - 2):
        ne = _drop_vertex(p, eu, ev, ed, ne)
        val, bu, bv = _chain_sweep(p, eu, ev, ed, ne, x, y, E, seg, unit, False, dummy)
        if val > best:
            best = val
            bp = p
    return best, bp


def _trace_polygon(p, x, y, eu, ev, ed, tables, unit=False):
    """Re-run the sweep for bottom vertex ``p`` and return the vertex chain (sorted indices)."""
    keep = (eu > p) & (ev > p)
    eu, ev, ed = eu[keep], ev[keep], ed[keep]
    pred = np.full((len(x), len(x)), -1, dtype=np.int64)
    _, u, v = _chain_sweep(p, eu, ev, ed, len(eu), x, y, *tables, unit, True, pred)
    chain = [int(v), int(u)]
    h = int(pred[u, v])
    while h >= 0:
        chain.append(h)
        u, v = h, u
        h = int(pred[u, v])
    chain.append(p)
    return chain[::-1]


# ---------------------------------------------------------------- search

def _require_general_position(net: np.ndarray) -> None:
    bad = check_general_position(net)
    if bad:
        raise CollinearNet(f"net is not in general position; first offending triple {bad[0]}")


def _unit_tables(net: np.ndarray) -> PairTables:
    ones = LabeledPointSet(net, np.ones(len(net), dtype=np.int8))
    return ExhaustiveCounter(ones).pair_tables(net)


def _island_from_vertices(net: np.ndarray, verts: list[int], disc: int) -> Island:
    if len(verts) >= 3:
        hull = ConvexPolygon(net[verts], check=False)
        members = np.nonzero(points_in_polygon_mask(hull, net))[0]
    else:
        hull = None
        members = np.asarray(sorted(verts), dtype=np.int64)
    return Island(tuple(int(i) for i in members), tuple(int(v) for v in verts), hull, int(disc))


def opt_island(net, table: TriangleDiscTable, *, validate: bool = True) -> Island:
    """Island of maximum discrepancy (then fewest members), including the
    empty island and singletons."""
    net = as_points(net)
    n = len(net)
    if validate:
        _require_general_position(net)
    t = table.tables
    scale = n + 1
    comb = t.combine(scale, _unit_tables(net), -1)
    best_score, best_verts = 0, []  # empty island
    # singletons and segments
    for a in range(n):
        s = int(comb.point[a])
        if s > best_score:
            best_score, best_verts = s, [a]
    if n >= 2:
        iu, ju = np.triu_indices(n, k=1)
        segs = comb.segment[iu, ju]
        k = int(np.argmax(segs))
        if segs[k] > best_score:
            best_score, best_verts = int(segs[k]), [int(iu[k]), int(ju[k])]
    if n >= 3:
        order = np.lexsort((net[:, 0], net[:, 1]))
        sub = lambda A: np.ascontiguousarray(A[np.ix_(order, order)])  # noqa: E731
        x = np.ascontiguousarray(net[order, 0])
        y = np.ascontiguousarray(net[order, 1])
        tabs = (_edge_table(x, sub(comb.le_open), sub(comb.le_closed), sub(comb.lt_open),
                            sub(comb.lt_closed)), sub(comb.segment))
        edges = _edges_by_direction(x, y)
        score, p = _best_polygon(x, y, *(e.copy() for e in edges), *tabs, False)
        if p >= 0 and score > best_score:
            chain = _trace_polygon(p, x, y, *edges, tabs)
            best_score = int(score)
            best_verts = [int(order[v]) for v in chain]
    disc = -(-best_score // scale)
    return _island_from_vertices(net, best_verts, disc)


def island_oracle(net, counter) -> Island:
    """Subset enumeration: every island of ``net``, scored by direct scanning of
    the counter's sample. Same ordering as :func:`opt_island`."""
    net = as_points(net)
    n = len(net)
    if n > ISLAND_ORACLE_GUARD:
        raise InstanceTooLarge(f"island oracle is limited to {ISLAND_ORACLE_GUARD} net points")
    S = counter.S
    w = S.weights
    best: tuple[int, tuple[int, ...]] = (0, ())
    for size in range(1, n + 1):
        for sub in itertools.combinations(range(n), size):
            mem = net[list(sub)]
            inside_net = closed_hull_contains(mem, net)
            if int(inside_net.sum()) != size or not inside_net[list(sub)].all():
                continue
            d = int(w[closed_hull_contains(mem, S.points)].sum()) if len(S) else 0
            if d > best[0]:
                best = (d, sub)
    d, sub = best
    verts = hull_indices(net[list(sub)]) if sub else []
    verts = [sub[v] for v in verts]
    isl = _island_from_vertices(net, verts, d)
    if len(sub) <= 2:
        isl = Island(tuple(sub), tuple(sub), None, d)
    return isl


def is_island(net, members) -> bool:
    net = as_points(net)
    members = list(members)
    inside = closed_hull_contains(net[members], net) if members else np.zeros(len(net), bool)
    return set(np.nonzero(inside)[0].tolist()) == set(members)


def max_island_vertices(net) -> int:
    """Largest hull vertex count over all islands of ``net``."""
    net = as_points(net)
    n = len(net)
    if n < 3:
        return n
    order = np.lexsort((net[:, 0], net[:, 1]))
    x = np.ascontiguousarray(net[order, 0])
    y = np.ascontiguousarray(net[order, 1])
    best, _ = _best_polygon(x, y, *_edges_by_direction(x, y), np.zeros((1, 1, 2), np.int64),
                            np.zeros((1, 1), np.int64), True)
    return int(best)


def vertex_bound(n: int, lam: float = VALTR_LAMBDA) -> float:
    return lam * n ** (1.0 / 3.0)


# ---------------------------------------------------------------- learner

def convex_sample_size(eps: float, c1: float = 4.0) -> int:
    return math.ceil(c1 * eps ** -2.5 * math.log(1.0 / eps))


def convex_net_size(eps: float, c2: float = 8.0) -> int:
    return math.ceil(c2 * eps ** -1.5)


@dataclass
class ConvexRun:
    """One run of the convex learner: the island, its hull and the draw sizes."""

    island: Island
    net: np.ndarray
    s: int
    n: int

    @property
    def polygon(self) -> ConvexPolygon | None:
        return self.island.hull


def learn_convex_once(eps: float, source, rng=None, *, c1: float = 4.0, c2: float = 8.0,
                      s: int | None = None, n: int | None = None, mode: str = "indexed") -> ConvexRun:
    """Draw ``s`` examples and a uniform net of ``n`` points, return the
    maximum-discrepancy island."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    rng = np.random.default_rng(rng)
    s = s if s is not None else convex_sample_size(eps, c1)
    n = n if n is not None else convex_net_size(eps, c2)
    S = source.draw(s)
    net = sample_uniform_net(n, rng)
    _require_general_position(net)
    counter = net_counter(S, net, mode)
    table = build_triangle_table(net, counter)
    isl = opt_island(net, table, validate=False)
    return ConvexRun(isl, net, s, n)
