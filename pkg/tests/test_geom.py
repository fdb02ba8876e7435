import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agnostic2d.errors import DegenerateHull
from agnostic2d.geom import (
    ConvexPolygon,
    Halfplane,
    Region,
    batch_points_in_polygon,
    check_general_position,
    closed_hull_contains,
    convex_hull,
    fan_triangulate,
    halfplane_intersection,
    orientation,
    orient_sign,
    points_in_polygon_mask,
    polygon_contains,
    shoelace_area,
    triangle,
)


def test_orientation_examples():
    assert orientation((0, 0), (1, 0), (0, 1)) == 1
    assert orientation((0, 0), (1, 1), (2, 2)) == 0
    assert orientation((0, 0), (0, 1), (1, 0)) == -1


def test_orientation_near_degenerate_is_exact():
    # 0.1 is not exactly representable: the float determinant of these nearly
    # collinear points is at rounding level, so the rational fallback decides.
    p, q = (0.1, 0.1), (0.3, 0.3)
    r = (0.2, 0.2 + 2.0 ** -55)
    from fractions import Fraction as F
    det = (F(q[0]) - F(p[0])) * (F(r[1]) - F(p[1])) - (F(q[1]) - F(p[1])) * (F(r[0]) - F(p[0]))
    expected = (det > 0) - (det < 0)
    assert orientation(p, q, r) == expected
    assert orient_sign(p[0], p[1], q[0], q[1], np.array([r[0]]), np.array([r[1]]))[0] == expected


def test_orient_sign_matches_scalar():
    rng = np.random.default_rng(0)
    pts = rng.random((200, 6))
    pts[::7, 4:6] = pts[::7, 0:2] + 0.5 * (pts[::7, 2:4] - pts[::7, 0:2])  # on-line cases
    vec = orient_sign(*pts.T)
    ref = [orientation(r[0:2], r[2:4], r[4:6]) for r in pts]
    assert vec.tolist() == ref


def test_convex_hull_square():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    h = convex_hull(pts)
    assert sorted(map(tuple, h.vertices.tolist())) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert polygon_contains(h, pts).all()
    assert h.area == pytest.approx(1.0)


def test_convex_hull_triangle_and_degenerate():
    h = convex_hull([(0, 0), (1, 0), (0, 1)])
    assert len(h) == 3 and h.area == pytest.approx(0.5)
    with pytest.raises(DegenerateHull):
        convex_hull([(0, 0), (1, 0), (2, 0)])
    with pytest.raises(DegenerateHull):
        convex_hull([(0, 0), (0, 0), (1, 1)])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=3, max_size=40))
def test_hull_idempotent_and_covering(pts):
    try:
        h = convex_hull(pts)
    except DegenerateHull:
        return
    assert polygon_contains(h, pts).all()
    h2 = convex_hull(h.vertices)
    assert set(map(tuple, h2.vertices.tolist())) == set(map(tuple, h.vertices.tolist()))


def test_convex_polygon_rejects_bad_input():
    with pytest.raises(ValueError):
        ConvexPolygon([(0, 0), (0, 1), (1, 0)])  # clockwise
    with pytest.raises(ValueError):
        ConvexPolygon([(0, 0), (1, 0), (2, 0), (1, 1)])  # collinear consecutive
    with pytest.raises(ValueError):
        ConvexPolygon([(0, 0), (1, 0)])


def _hp_ge(ax, ay, b):
    """a.x >= b as the closed halfplane -a.x <= -b."""
    return Halfplane((-ax, -ay), -b)


def test_halfplane_intersection_simplex():
    hs = [_hp_ge(1, 0, 0), _hp_ge(0, 1, 0), Halfplane((1, 1), 1)]
    P = halfplane_intersection(hs)
    assert isinstance(P, ConvexPolygon)
    assert sorted(map(tuple, np.round(P.vertices, 12).tolist())) == [(0, 0), (0, 1), (1, 0)]
    for h in hs:
        assert np.all(P.vertices @ np.asarray(h.a) <= h.b + 1e-9)


def test_halfplane_intersection_empty_and_unbounded():
    assert halfplane_intersection([_hp_ge(1, 0, 0), _hp_ge(0, 1, 0), Halfplane((1, 0), -1)]) is Region.EMPTY
    assert halfplane_intersection([_hp_ge(1, 0, 0), _hp_ge(0, 1, 0)]) is Region.UNBOUNDED


def test_halfplane_intersection_redundant_and_anchors():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    hs = [Halfplane.left_of(sq[i], sq[(i + 1) % 4]) for i in range(4)]
    hs.append(Halfplane.left_of((-1, -1), (3, -1)))  # redundant
    P = halfplane_intersection(hs)
    assert isinstance(P, ConvexPolygon) and len(P) == 4
    assert P.area == pytest.approx(1.0)
    # each edge carries the anchors of its own supporting halfplane
    for i in range(4):
        (px, py), (qx, qy) = P.edge_anchor(i)
        a, b = P.vertices[i], P.vertices[(i + 1) % 4]
        assert orientation((px, py), (qx, qy), a) == 0
        assert orientation((px, py), (qx, qy), b) == 0


def test_halfplane_intersection_degenerate_point_is_empty():
    # three halfplanes meeting in a single point
    hs = [_hp_ge(1, 0, 0), _hp_ge(0, 1, 0), Halfplane((1, 1), 0)]
    assert halfplane_intersection(hs) is Region.EMPTY


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)),
                min_size=3, max_size=5))
def test_halfplane_intersection_vertices_feasible(rows):
    hs = []
    for px, py, qx, qy in rows:
        if (px, py) == (qx, qy):
            return
        hs.append(Halfplane.left_of((px, py), (qx, qy)))
    P = halfplane_intersection(hs)
    if isinstance(P, ConvexPolygon):
        assert len(P) <= len(hs)
        for h in hs:
            scale = abs(h.a[0]) + abs(h.a[1]) + abs(h.b)
            assert np.all(P.vertices @ np.asarray(h.a) <= h.b + 1e-9 * scale)


def test_fan_triangulate_examples():
    T = triangle((0, 0), (1, 0), (0, 1))
    assert len(fan_triangulate(T)) == 1
    sq = ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    tris = fan_triangulate(sq)
    assert [t.vertices.tolist() for t in tris] == [[[0, 0], [1, 0], [1, 1]], [[0, 0], [1, 1], [0, 1]]]


def test_fan_triangulate_hexagon_area():
    ang = np.arange(6) * math.pi / 3
    hexagon = ConvexPolygon(np.column_stack([np.cos(ang), np.sin(ang)]))
    tris = fan_triangulate(hexagon)
    assert len(tris) == 4
    assert sum(shoelace_area(t.vertices) for t in tris) == pytest.approx(hexagon.area, rel=1e-9)
    assert hexagon.area == pytest.approx(3 * math.sqrt(3) / 2, rel=1e-12)


def test_batch_points_in_polygon_examples():
    sq = ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    got = batch_points_in_polygon(sq, [(0.5, 0.5), (2, 2), (1, 0.5)])
    assert got.tolist() == [[0.5, 0.5], [1.0, 0.5]]
    assert len(batch_points_in_polygon(sq, np.zeros((0, 2)))) == 0


def test_batch_matches_pointwise_random():
    rng = np.random.default_rng(5)
    for _ in range(20):
        pts = rng.random((12, 2))
        P = convex_hull(pts)
        Q = rng.random((100, 2)) * 1.4 - 0.2
        Q = np.vstack([Q, P.vertices, (P.vertices + np.roll(P.vertices, -1, axis=0)) / 2])
        ref = np.array([all(orientation(P.vertices[i], P.vertices[(i + 1) % len(P)], q) >= 0
                            for i in range(len(P))) for q in Q])
        assert np.array_equal(points_in_polygon_mask(P, Q), ref)
        assert np.array_equal(polygon_contains(P, Q), ref)


def test_closed_hull_contains_small_cases():
    q = np.array([(0.5, 0.5), (0, 0), (1, 1), (2, 2)])
    assert closed_hull_contains(np.zeros((0, 2)), q).tolist() == [False] * 4
    assert closed_hull_contains([(0, 0)], q).tolist() == [False, True, False, False]
    assert closed_hull_contains([(0, 0), (1, 1)], q).tolist() == [True, True, True, False]


def test_general_position_checker():
    assert check_general_position([(0, 0), (1, 0), (0, 1), (1, 1)]) == []
    assert (0, 1, 2) in check_general_position([(0, 0), (1, 1), (2, 2), (5, 0)])
    assert check_general_position([(0, 0), (0, 0), (1, 0)])
