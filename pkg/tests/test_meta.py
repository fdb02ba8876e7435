import math
from fractions import Fraction

import numpy as np
import pytest

from agnostic2d.data import ExampleSource, PlantedConcept
from agnostic2d.disc import LabeledPointSet
from agnostic2d.errors import AllInvocationsFailed, HullTooLarge
from agnostic2d.geom import ConvexPolygon, orientation, triangle
from agnostic2d.meta import (
    AmplificationPlan,
    Hypothesis,
    amplify,
    distance_estimate,
    distance_sample_size,
    kgon_sample_size,
    learn_convex,
    learn_kgon,
)

GOOD = PlantedConcept.triangle()
BAD = triangle((0.0, 0.95), (0.05, 0.95), (0.0, 1.0))


def test_plan_examples():
    p = AmplificationPlan.for_params(0.3, 0.01)
    assert (p.t, p.q) == (6, 461)
    p = AmplificationPlan.for_params(0.5, 0.49)
    assert (p.t, p.q) == (2, 26)
    assert p.base_eps == pytest.approx(0.5 / 3)


def test_plan_formulas_random():
    rng = np.random.default_rng(0)
    for _ in range(100):
        eps = float(rng.uniform(0.01, 0.99))
        delta = float(rng.uniform(0.001, 0.499))
        p = AmplificationPlan.for_params(eps, delta)
        assert p.t == math.ceil(math.log(2 / delta))
        assert p.q == math.ceil(9 / eps ** 2 * math.log(1 / delta))
        assert p.t >= 1 and p.q >= 1


def test_plan_rejects_bad_delta():
    for eps, delta in [(0.1, 0.5), (0.1, 0.0), (0.0, 0.1), (1.0, 0.1)]:
        with pytest.raises(ValueError):
            AmplificationPlan.for_params(eps, delta)


def test_hypothesis_evaluation_is_closed():
    h = Hypothesis("kgon", polygon=triangle((0, 0), (1, 0), (0, 1)), k=3)
    assert h.evaluate([(0.5, 0.5), (0, 0), (0.6, 0.6)]).tolist() == [True, True, False]
    assert not Hypothesis.constant0().evaluate([(0.5, 0.5)]).any()
    seg = Hypothesis("island", support=np.array([(0.0, 0.0), (1.0, 1.0)]))
    assert seg.evaluate([(0.5, 0.5), (0.5, 0.4)]).tolist() == [True, False]


def test_batch_error_equals_per_point():
    rng = np.random.default_rng(1)
    P = ConvexPolygon(np.array([(0.1, 0.1), (0.8, 0.2), (0.9, 0.7), (0.3, 0.9)]))
    h = Hypothesis("kgon", polygon=P, k=4)
    pts = np.round(rng.random((2000, 2)), 1)  # many boundary hits
    S = LabeledPointSet(pts, rng.integers(0, 2, 2000))
    per_point = sum(
        int(all(orientation(P.vertices[i], P.vertices[(i + 1) % 4], p) >= 0 for i in range(4)) != bool(y))
        for p, y in zip(S.points, S.labels)
    )
    assert h.empirical_error(S) == Fraction(per_point, 2000)


def _stub(p_good=2 / 3):
    def base(eps, rng):
        if rng.random() < p_good:
            return Hypothesis("kgon", polygon=GOOD.hull, k=3)
        return Hypothesis("kgon", polygon=BAD, k=3)
    return base


def test_amplification_stub():
    fails = 0
    for trial in range(200):
        src = ExampleSource.planted(GOOD, 0.0, seed=trial)
        h = amplify(_stub(), 0.3, 0.05, src, rng=10_000 + trial)
        fails += h.polygon is BAD
    assert fails / 200 <= 0.10


def test_amplify_ties_go_to_earliest():
    src = ExampleSource.constant(0, seed=1)
    calls = []

    def base(eps, rng):
        calls.append(eps)
        return Hypothesis.constant0(run=len(calls))

    h = amplify(base, 0.3, 0.1, src, rng=0)
    assert h.info["run"] == 1 and h.info["chosen"] == 0
    assert calls == [pytest.approx(0.1)] * 3


def test_amplify_failures():
    src = ExampleSource.constant(0, seed=1)

    def always_fail(eps, rng):
        raise HullTooLarge("too many vertices")

    with pytest.raises(AllInvocationsFailed):
        amplify(always_fail, 0.3, 0.1, src, rng=0)

    state = {"n": 0}

    def sometimes(eps, rng):
        state["n"] += 1
        if state["n"] == 1:
            raise HullTooLarge("first run rejected")
        return Hypothesis.constant0()

    h = amplify(sometimes, 0.3, 0.1, src, rng=0)
    assert h.info["chosen"] == 1 and len(h.info["failures"]) == 1
    assert state["n"] == h.info["t"]  # slot consumed, t not extended


def test_kgon_learner_budget_and_accuracy():
    probe = np.random.default_rng(7).random((100_000, 2))
    src = ExampleSource.planted(GOOD, 0.0, seed=3)
    h = learn_kgon(0.2, 0.1, 3, src, rng=4, net_n=14)
    plan = AmplificationPlan.for_params(0.2, 0.1)
    assert h.info["samples"] == kgon_sample_size(0.2 / 3) * plan.t + plan.q == src.drawn
    assert h.kind == "kgon" and len(h.polygon) == 3
    err = np.mean(h.evaluate(probe) != GOOD.contains(probe))
    assert err <= 0.2


def test_convex_learner_constant_source():
    h = learn_convex(0.3, 0.2, ExampleSource.constant(0, seed=2), rng=3)
    assert h.is_constant0
    probe = np.random.default_rng(0).random((1000, 2))
    assert not h.evaluate(probe).any()


def test_convex_learner_disk_and_vertex_bound():
    disk = PlantedConcept.disk()
    probe = np.random.default_rng(8).random((100_000, 2))
    src = ExampleSource.planted(disk, 0.0, seed=5)
    h = learn_convex(0.3, 0.2, src, rng=6)
    assert h.kind == "island" and h.polygon is not None
    assert len(h.polygon) <= 7 * h.info["net_size"] ** (1 / 3)
    assert np.mean(h.evaluate(probe) != disk.contains(probe)) <= 0.3


def test_convex_learner_refuses_unasserted_file(tmp_path):
    from agnostic2d.data import save_dataset

    f = save_dataset(ExampleSource.constant(0, seed=0).draw(50), tmp_path / "z.csv")
    with pytest.raises(ValueError):
        learn_convex(0.3, 0.2, ExampleSource.from_file(f), rng=0)


def test_distance_estimate_noise_free_and_sizes():
    assert distance_sample_size(0.1, 0.1) == math.ceil(800 * math.log(40))
    src = ExampleSource.planted(GOOD, 0.0, seed=11)
    est = distance_estimate("kgon", 0.2, 0.2, src, rng=12, net_n=14)
    assert est.value <= 0.2
    assert est.samples == src.drawn
    with pytest.raises(ValueError):
        distance_estimate("circles", 0.2, 0.2, src)


def test_distance_estimate_replayed_hypothesis():
    # labels produced by a k-gon itself: distance 0
    tri = PlantedConcept.triangle((0.2, 0.2), (0.8, 0.3), (0.5, 0.8))
    src = ExampleSource.planted(tri, 0.0, seed=13)
    assert distance_estimate("kgon", 0.2, 0.2, src, rng=14, net_n=14).value <= 0.2
