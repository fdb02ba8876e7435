import math
from fractions import Fraction

import numpy as np
import pytest

from agnostic2d.disc import ExhaustiveCounter, LabeledPointSet, err_from_disc, mistakes
from agnostic2d.errors import EmptyReferenceSet, InstanceTooLarge, TooFewPoints
from agnostic2d.geom import ConvexPolygon, Halfplane, halfplane_intersection, orientation, polygon_contains
from agnostic2d.kgon import (
    EnumerationStats,
    NetSample,
    approximate_erm_kgon,
    enumerate_reference_kgons,
    exact_erm_oracle,
    induced_halfplanes,
    induced_lines,
    net_size,
    sample_net,
)

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def test_net_size_examples():
    assert net_size(0.1, 3, c=10, log_base="2") == 476
    # lemma-derived default: (4k/eps) ln(6k)
    assert net_size(0.1, 3) == math.ceil(120 * math.log(18)) == 347
    with pytest.raises(ValueError):
        net_size(1.5, 3)


def test_induced_halfplane_counts():
    assert len(induced_halfplanes(SQUARE)) == 12
    assert len(induced_halfplanes([(0, 0), (1, 1)])) == 2
    assert len(induced_halfplanes([(0, 0), (0, 0), (1, 1)])) == 2
    # three collinear points share one line
    assert len(induced_lines([(0, 0), (1, 1), (2, 2), (3, 0)])) == 4
    with pytest.raises(TooFewPoints):
        induced_halfplanes([(0.5, 0.5), (0.5, 0.5)])


def test_induced_halfplanes_pass_through_points():
    rng = np.random.default_rng(0)
    pts = rng.random((7, 2))
    hs = induced_halfplanes(pts)
    assert len(hs) == 2 * 21
    for h in hs:
        on = [p for p in pts if abs(np.dot(h.a, p) - h.b) <= 1e-12]
        assert len(on) >= 2


def test_sample_net_properties():
    rng = np.random.default_rng(1)
    S = LabeledPointSet(rng.random((30, 2)), rng.integers(0, 2, 30))
    net = sample_net(S, 50, rng)
    assert net.n == 50
    assert all(any((p == q).all() for q in S.points) for p in net.points)
    one = LabeledPointSet([(0.5, 0.5)], [1])
    with pytest.raises(TooFewPoints):
        sample_net(one, 5, rng)


def test_enumeration_contains_square_triangle_and_bound():
    hs = induced_halfplanes(SQUARE)
    stats = EnumerationStats()
    found = list(enumerate_reference_kgons(hs, 3, stats))
    target = {(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)}
    direct = halfplane_intersection([Halfplane.left_of((0, 0), (1, 0)), Halfplane.left_of((1, 0), (1, 1)),
                                     Halfplane.left_of((1, 1), (0, 0))])
    assert set(map(tuple, direct.vertices.tolist())) == target
    assert any(set(map(tuple, np.round(r.polygon.vertices, 9).tolist())) == target for r in found)
    assert stats.examined == math.comb(12, 3)
    assert stats.yielded == len(found) <= math.comb(12, 3)
    keys = [r.polygon.vertex_key() for r in found]
    assert len(keys) == len(set(keys))


def test_same_facing_halfplanes_skipped():
    hs = [Halfplane((0.0, 1.0), 0.0), Halfplane((1e-6, 1.0), 0.0), Halfplane((-1e-6, 1.0), 0.1)]
    assert list(enumerate_reference_kgons(hs, 3)) == []


def _fast_vs_generic(S, net_pts):
    net = NetSample(net_pts, np.arange(len(net_pts)))
    fast = approximate_erm_kgon(S, 0.1, 3, net=net)
    fast_ex = approximate_erm_kgon(S, 0.1, 3, net=net, mode="exhaustive")
    hs = induced_halfplanes(net_pts)
    ex = ExhaustiveCounter(S)
    refs = list(enumerate_reference_kgons(hs, 3))
    discs = [ex.disc_polygon(r.polygon) for r in refs]
    best = max(discs)
    first = refs[discs.index(best)]
    return fast, fast_ex, best, first, refs, discs


@pytest.mark.parametrize("seed", range(6))
def test_fast_path_matches_generic_enumeration(seed):
    rng = np.random.default_rng(seed)
    m = 60
    S = LabeledPointSet(rng.random((m, 2)), rng.integers(0, 2, m))
    net_pts = rng.random((6, 2)) if seed % 2 else S.points[:6]
    fast, fast_ex, best, first, refs, discs = _fast_vs_generic(S, net_pts)
    assert fast.disc == fast_ex.disc == best
    assert fast.best.halfplanes == fast_ex.best.halfplanes == first.halfplanes
    # argmax property
    assert all(fast.disc >= d for d in discs)
    # number of bounded reference triangles agrees with the fast enumerator's family
    assert len(refs) > 0


def test_generic_path_k4_against_enumeration():
    rng = np.random.default_rng(9)
    S = LabeledPointSet(rng.random((40, 2)), rng.integers(0, 2, 40))
    net_pts = rng.random((5, 2))
    res = approximate_erm_kgon(S, 0.1, 4, net=NetSample(net_pts, np.arange(5)))
    ex = ExhaustiveCounter(S)
    discs = [ex.disc_polygon(r.polygon) for r in enumerate_reference_kgons(induced_halfplanes(net_pts), 4)]
    assert res.disc == max(discs)
    assert ex.disc_polygon(res.polygon) == res.disc


def test_membership_and_claim_consistency():
    rng = np.random.default_rng(4)
    S = LabeledPointSet(rng.random((300, 2)), rng.integers(0, 2, 300))
    res = approximate_erm_kgon(S, 0.2, 3, rng=rng, n=12)
    P = res.polygon
    net = res.net.points
    for i in range(len(P)):
        (px, py), (qx, qy) = P.edge_anchor(i)
        assert any((net == (px, py)).all(1)) and any((net == (qx, qy)).all(1))
        # vertices lie on their edge lines
        for v in (P.vertices[i], P.vertices[(i + 1) % len(P)]):
            a = np.array([qy - py, -(qx - px)])
            assert abs(a @ v - a @ (px, py)) <= 1e-9
    inside = polygon_contains(P, S.points)
    err = Fraction(mistakes(inside, S.labels), len(S))
    assert err == err_from_disc(res.disc, S.positives, S.total)
    assert ExhaustiveCounter(S).disc_polygon(P) == res.disc


def test_planted_triangle_zero_noise():
    # desk-scale net (n = 20) instead of the lemma-derived size
    rng = np.random.default_rng(12)
    tri = ConvexPolygon([(0.1, 0.1), (0.9, 0.2), (0.4, 0.9)])
    ok = 0
    for _ in range(6):
        pts = rng.random((2000, 2))
        S = LabeledPointSet(pts, polygon_contains(tri, pts))
        res = approximate_erm_kgon(S, 0.1, 3, rng=rng, n=20)
        ok += err_from_disc(res.disc, S.positives, S.total) <= 0.1
    assert ok >= 4


def test_all_negative_sample():
    rng = np.random.default_rng(3)
    S = LabeledPointSet(rng.random((500, 2)), np.zeros(500))
    res = approximate_erm_kgon(S, 0.2, 3, rng=rng, n=15)
    assert res.disc == 0
    assert err_from_disc(res.disc, 0, 500) == 0


def test_oracle_examples():
    S = LabeledPointSet([(0, 0), (1, 0), (0.3, 1)], [1, 1, 1])
    r = exact_erm_oracle(S, 3)
    assert r.disc == 3
    assert set(map(tuple, np.round(r.polygon.vertices, 12).tolist())) == {(0, 0), (1, 0), (0.3, 1)}
    # two points induce a single line: no triangle exists
    with pytest.raises(EmptyReferenceSet):
        exact_erm_oracle(LabeledPointSet([(0.2, 0.2), (0.7, 0.6)], [1, 0]), 3)
    rng = np.random.default_rng(8)
    neg = LabeledPointSet(rng.random((12, 2)), np.zeros(12))
    assert exact_erm_oracle(neg, 3).disc == 0
    with pytest.raises(InstanceTooLarge):
        exact_erm_oracle(LabeledPointSet(rng.random((26, 2)), np.zeros(26)), 3)


@pytest.mark.parametrize("seed", range(5))
def test_oracle_gap_full_net(seed):
    rng = np.random.default_rng(100 + seed)
    m = int(rng.integers(6, 14))
    S = LabeledPointSet(rng.random((m, 2)), rng.integers(0, 2, m))
    res = approximate_erm_kgon(S, 0.1, 3, net=NetSample(S.points, np.arange(m)))
    o = exact_erm_oracle(S, 3)
    assert res.disc == o.disc
    assert res.best.halfplanes == o.halfplanes


def test_oracle_k4_small():
    rng = np.random.default_rng(21)
    S = LabeledPointSet(rng.random((6, 2)), rng.integers(0, 2, 6))
    o = exact_erm_oracle(S, 4)
    res = approximate_erm_kgon(S, 0.1, 4, net=NetSample(S.points, np.arange(6)))
    assert o.disc == res.disc


def test_grid_data_with_collinear_net():
    # many collinear triples and on-line sample points; index must agree with scanning
    rng = np.random.default_rng(5)
    pts = rng.integers(0, 5, (80, 2)) / 4
    S = LabeledPointSet(pts, rng.integers(0, 2, 80))
    net = np.unique(pts, axis=0)[:9]
    a = approximate_erm_kgon(S, 0.1, 3, net=NetSample(net, np.arange(len(net))))
    b = approximate_erm_kgon(S, 0.1, 3, net=NetSample(net, np.arange(len(net))), mode="exhaustive")
    assert a.disc == b.disc == ExhaustiveCounter(S).disc_polygon(a.polygon)
    assert a.best.halfplanes == b.best.halfplanes
