"""Success amplification, the full (eps, delta) learners and distance estimation.

A *base learner* is any callable ``base(eps, rng) -> Hypothesis`` that may
raise :class:`~agnostic2d.errors.AlgorithmFailure`. :func:`amplify` runs it
``t`` times at loss ``eps / 3`` and keeps the candidate with the smallest
error on a fresh validation sample.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .data import ExampleSource, child_seed, make_rng
from .disc import LabeledPointSet, mistakes
from .errors import AlgorithmFailure, AllInvocationsFailed, HullTooLarge
from .geom import ConvexPolygon, as_points, closed_hull_contains, points_in_polygon_mask
from .island import VALTR_LAMBDA, Island, learn_convex_once, vertex_bound
from .kgon import approximate_erm_kgon

KGON_SAMPLE_C = 8.0


@dataclass
class Hypothesis:
    """A proper hypothesis: a closed convex polygon, a degenerate hull
    (one or two support points) or the constant-0 classifier."""

    kind: str  # "kgon", "island" or "constant0"
    polygon: ConvexPolygon | None = None
    support: np.ndarray | None = None
    k: int | None = None
    info: dict = field(default_factory=dict)

    @classmethod
    def constant0(cls, **info) -> "Hypothesis":
        return cls("constant0", info=dict(info))

    @classmethod
    def from_island(cls, island: Island, net: np.ndarray) -> "Hypothesis":
        if island.hull is not None:
            return cls("island", polygon=island.hull)
        if island.members:
            return cls("island", support=as_points(net[list(island.members)]))
        return cls.constant0()

    @property
    def is_constant0(self) -> bool:
        return self.polygon is None and (self.support is None or len(self.support) == 0)

    @property
    def vertices(self) -> np.ndarray:
        if self.polygon is not None:
            return self.polygon.vertices
        if self.support is not None:
            return self.support
        return np.zeros((0, 2))

    def evaluate(self, points) -> np.ndarray:
        """Boundary-inclusive labels; polygons use the O((v + q) log v) batch test."""
        pts = as_points(points)
        if self.polygon is not None:
            return points_in_polygon_mask(self.polygon, pts)
        if self.support is not None and len(self.support):
            return closed_hull_contains(self.support, pts)
        return np.zeros(len(pts), dtype=bool)

    def empirical_error(self, S: LabeledPointSet) -> Fraction:
        if len(S) == 0:
            return Fraction(0)
        return Fraction(mistakes(self.evaluate(S.points), S.labels), len(S))


# ---------------------------------------------------------------- amplification

@dataclass(frozen=True)
class AmplificationPlan:
    eps: float
    delta: float
    t: int
    q: int

    @property
    def base_eps(self) -> float:
        return self.eps / 3.0

    @classmethod
    def for_params(cls, eps: float, delta: float) -> "AmplificationPlan":
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if not 0 < delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")
        t = max(1, math.ceil(math.log(2.0 / delta)))
        q = max(1, math.ceil(9.0 / eps ** 2 * math.log(1.0 / delta)))
        return cls(eps, delta, t, q)


BaseLearner = Callable[[float, np.random.Generator], Hypothesis]


def amplify(base: BaseLearner, eps: float, delta: float, source: ExampleSource, rng=None) -> Hypothesis:
    """Best of ``t`` independent base runs, judged on ``q`` fresh examples.

    A failed run keeps its slot empty. Ties go to the earliest run. The
    returned hypothesis carries the plan, validation errors, failures and
    sample counts in ``info``.
    """
    plan = AmplificationPlan.for_params(eps, delta)
    rng = np.random.default_rng(rng)
    drawn0 = source.drawn
    candidates: list[Hypothesis | None] = []
    failures: list[str] = []
    timings: list[float] = []
    for _ in range(plan.t):
        sub = make_rng(child_seed(rng))
        t0 = time.perf_counter()
        try:
            candidates.append(base(plan.base_eps, sub))
        except AlgorithmFailure as exc:
            candidates.append(None)
            failures.append(f"{type(exc).__name__}: {exc}")
        timings.append(time.perf_counter() - t0)
    if all(c is None for c in candidates):
        raise AllInvocationsFailed(f"all {plan.t} base runs failed: {failures}")
    base_samples = source.drawn - drawn0
    Q = source.draw(plan.q)
    errors: list[Fraction | None] = [None if h is None else h.empirical_error(Q) for h in candidates]
    best = min((e, j) for j, e in enumerate(errors) if e is not None)[1]
    out = candidates[best]
    out.info.update({
        "t": plan.t, "q": plan.q, "base_eps": plan.base_eps, "chosen": best,
        "validation_errors": [None if e is None else float(e) for e in errors],
        "failures": failures, "base_samples": base_samples, "validation_samples": plan.q,
        "samples": base_samples + plan.q, "base_seconds": timings,
    })
    return out


# ---------------------------------------------------------------- learners

def kgon_sample_size(eps: float, c: float = KGON_SAMPLE_C) -> int:
    return math.ceil(c / eps ** 2)


def kgon_base(k: int, source: ExampleSource, *, c: float = KGON_SAMPLE_C, net_c: float | None = None,
              net_n: int | None = None, log_base: str = "e", mode: str = "indexed") -> BaseLearner:
    """Base k-gon learner: ``ceil(c / eps^2)`` examples, then approximate ERM."""

    def base(eps: float, rng: np.random.Generator) -> Hypothesis:
        S = source.draw(kgon_sample_size(eps, c))
        res = approximate_erm_kgon(S, eps, k, net_c, rng, n=net_n, mode=mode, log_base=log_base)
        return Hypothesis("kgon", polygon=res.polygon, k=k,
                          info={"train_disc": res.disc, "net_size": len(res.net.points)})

    return base


def learn_kgon(eps: float, delta: float, k: int, source: ExampleSource, rng=None, *,
               c: float = KGON_SAMPLE_C, net_c: float | None = None, net_n: int | None = None,
               log_base: str = "e", mode: str = "indexed") -> Hypothesis:
    """Agnostic learner for k-gons: amplified approximate ERM."""
    if k < 3:
        raise ValueError("k must be at least 3")
    base = kgon_base(k, source, c=c, net_c=net_c, net_n=net_n, log_base=log_base, mode=mode)
    return amplify(base, eps, delta, source, rng)


def convex_base(source: ExampleSource, *, c1: float = 4.0, c2: float = 8.0, s: int | None = None,
                n: int | None = None, lam: float = VALTR_LAMBDA, mode: str = "indexed") -> BaseLearner:
    """Base convex learner: one island search; fails when the hull has more
    than ``lam * n^(1/3)`` vertices."""

    def base(eps: float, rng: np.random.Generator) -> Hypothesis:
        run = learn_convex_once(eps, source, rng, c1=c1, c2=c2, s=s, n=n, mode=mode)
        v = len(run.island.vertices)
        if v > vertex_bound(run.n, lam):
            raise HullTooLarge(f"island hull has {v} vertices, bound {vertex_bound(run.n, lam):.1f}")
        h = Hypothesis.from_island(run.island, run.net)
        h.info.update({"train_disc": run.island.disc, "net_size": run.n, "sample_size": run.s,
                       "island_size": run.island.size})
        return h

    return base


def learn_convex(eps: float, delta: float, source: ExampleSource, rng=None, *, c1: float = 4.0,
                 c2: float = 8.0, s: int | None = None, n: int | None = None, lam: float = VALTR_LAMBDA,
                 mode: str = "indexed") -> Hypothesis:
    """Agnostic learner for convex sets under the uniform marginal."""
    if not source.uniform:
        raise ValueError("the convex learner needs a uniform marginal; assert it explicitly for file sources")
    return amplify(convex_base(source, c1=c1, c2=c2, s=s, n=n, lam=lam, mode=mode), eps, delta, source, rng)


# ---------------------------------------------------------------- distance

def distance_sample_size(eps: float, delta: float) -> int:
    return math.ceil(8.0 / eps ** 2 * math.log(4.0 / delta))


@dataclass
class DistanceEstimate:
    value: Fraction
    hypothesis: Hypothesis
    samples: int


def distance_estimate(cls: str, eps: float, delta: float, source: ExampleSource, rng=None, *, k: int = 3,
                      **learner_kw) -> DistanceEstimate:
    """Distance of the source's labelling to the class, to within ``eps``.

    Learns at loss ``eps / 2`` and confidence ``delta / 2``, then measures the
    hypothesis on ``ceil((8 / eps^2) ln(4 / delta))`` fresh examples.
    """
    if not 0 < eps < 1 or not 0 < delta < 1:
        raise ValueError("eps and delta must lie in (0, 1)")
    rng = np.random.default_rng(rng)
    sub = make_rng(child_seed(rng))
    d2 = min(delta / 2.0, 0.49)
    drawn0 = source.drawn
    if cls == "kgon":
        h = learn_kgon(eps / 2.0, d2, k, source, sub, **learner_kw)
    elif cls == "convex":
        h = learn_convex(eps / 2.0, d2, source, sub, **learner_kw)
    else:
        raise ValueError(f"unknown class {cls!r}")
    fresh = source.draw(distance_sample_size(eps, delta))
    return DistanceEstimate(h.empirical_error(fresh), h, source.drawn - drawn0)


def estimate_distance(cls: str, eps: float, delta: float, source: ExampleSource, rng=None, **kw) -> Fraction:
    return distance_estimate(cls, eps, delta, source, rng, **kw).value
