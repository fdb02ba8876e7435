"""Verification suites, statistical checks and scaling benchmarks.

Every routine takes a seed and returns a small result object whose ``rows``
are CSV-ready dictionaries. The command-line driver and the acceptance
tests both go through these functions.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .data import DISK_AREA_028_RADIUS, ExampleSource, PlantedConcept, make_rng, split_rng
from .disc import ExhaustiveCounter, LabeledPointSet, LineAnchoredIndex, pair_lines
from .errors import EmptyReferenceSet
from .geom import ConvexPolygon, convex_hull, hull_indices, orient_sign, shoelace_area
from .island import (
    build_triangle_table,
    island_oracle,
    is_island,
    max_island_vertices,
    opt_island,
    sample_uniform_net,
    vertex_bound,
)
from .kgon import (
    EnumerationStats,
    NetSample,
    approximate_erm_kgon,
    enumerate_reference_kgons,
    exact_erm_oracle,
    induced_halfplanes,
)
from .meta import Hypothesis, amplify


@dataclass
class CheckResult:
    name: str
    passed: int
    total: int
    rows: list[dict] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    required: float = 1.0  # fraction of passing trials needed

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed >= self.required * self.total - 1e-9

    @property
    def rate(self) -> float:
        return self.passed / self.total if self.total else 0.0


def fit_loglog(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def _random_convex(rng, pool: np.ndarray, size: int) -> ConvexPolygon | None:
    pick = pool[rng.choice(len(pool), size=size, replace=False)]
    idx = hull_indices(pick)
    return ConvexPolygon(pick[idx]) if len(idx) >= 3 else None


# ---------------------------------------------------------------- verify suites

def verify_disc(seed: int = 0, seeds: int = 10, triangles: int = 50, polygons: int = 10,
                m: int = 500, net: int = 30) -> CheckResult:
    """Indexed vs exhaustive counts on random triangles and convex polygons
    with vertices in a random net (all pair lines registered)."""
    rows, passed, total = [], 0, 0
    for s in range(seeds):
        rng = split_rng(seed, "trial", s)
        S = LabeledPointSet(rng.random((m, 2)), rng.integers(0, 2, m))
        N = rng.random((net, 2))
        idx = LineAnchoredIndex(S, pair_lines(N))
        ex = ExhaustiveCounter(S)
        shapes: list[tuple[str, ConvexPolygon]] = []
        while sum(k == "triangle" for k, _ in shapes) < triangles:
            P = _random_convex(rng, N, 3)
            if P is not None:
                shapes.append(("triangle", P))
        while sum(k == "polygon" for k, _ in shapes) < polygons:
            P = _random_convex(rng, N, int(rng.integers(4, 10)))
            if P is not None and len(P) >= 4:
                shapes.append(("polygon", P))
        for kind, P in shapes:
            a = idx.disc_polygon(P)
            b = ex.disc_polygon(P)
            passed += a == b
            total += 1
            rows.append({"seed": s, "kind": kind, "vertices": len(P), "indexed": a, "exhaustive": b})
    return CheckResult("disc", passed, total, rows)


def verify_claim(seed: int = 0, trials: int = 200) -> CheckResult:
    """disc_S(P) = |S+| - err_S(f_P) |S| on random (P, S) pairs."""
    from fractions import Fraction

    from .disc import build_counter, mistakes
    from .geom import polygon_contains

    rng = split_rng(seed, "trial", 0)
    rows, passed = [], 0
    for t in range(trials):
        m = int(rng.integers(1, 300))
        S = LabeledPointSet(np.round(rng.random((m, 2)), 2), rng.integers(0, 2, m))
        P = convex_hull(np.round(rng.random((int(rng.integers(3, 9)), 2)), 2))
        d = build_counter(S).disc_polygon(P)
        err = Fraction(mistakes(polygon_contains(P, S.points), S.labels), m)
        ok = d == S.positives - err * m
        passed += ok
        rows.append({"trial": t, "m": m, "disc": d, "err": float(err), "ok": ok})
    return CheckResult("claim", passed, trials, rows)


def verify_kgon_oracle(seed: int = 0, trials: int = 30, m_min: int = 10, m_max: int = 25) -> CheckResult:
    """Approximate ERM with net = S against exhaustive ERM (k = 3)."""
    rows, passed, total = [], 0, 0
    t = 0
    while total < trials:
        rng = split_rng(seed, "trial", t)
        t += 1
        m = int(rng.integers(m_min, m_max + 1))
        S = LabeledPointSet(rng.random((m, 2)), rng.integers(0, 2, m))
        try:
            want = exact_erm_oracle(S, 3).disc
        except EmptyReferenceSet:
            continue
        got = approximate_erm_kgon(S, 0.1, 3, net=NetSample(S.points, np.arange(m))).disc
        passed += got == want
        total += 1
        rows.append({"trial": total - 1, "m": m, "learner": got, "oracle": want})
    return CheckResult("kgon-oracle", passed, total, rows)


def verify_island_oracle(seed: int = 0, trials: int = 50, n_max: int = 12, m_max: int = 60,
                         seeds: int = 10) -> CheckResult:
    """opt_island against subset enumeration."""
    rows, passed = [], 0
    for t in range(trials):
        rng = split_rng(seed, "trial", t % seeds, t)
        n = int(rng.integers(3, n_max + 1))
        m = int(rng.integers(0, m_max + 1))
        N = rng.random((n, 2))
        S = LabeledPointSet(rng.random((m, 2)), rng.integers(0, 2, m))
        counter = LineAnchoredIndex(S, pair_lines(N))
        got = opt_island(N, build_triangle_table(N, counter))
        want = island_oracle(N, counter)
        ok = got.disc == want.disc and is_island(N, got.members)
        passed += ok
        rows.append({"trial": t, "n": n, "m": m, "dp": got.disc, "oracle": want.disc, "island": ok})
    return CheckResult("island-oracle", passed, trials, rows)


def verify_refset(seed: int = 0, trials: int = 200, eps: float = 0.2, delta0: float = 0.2,
                  m: int = 1000, threshold: float = 0.7) -> CheckResult:
    """Induced halfplanes of a net drawn from S contain one within ``eps |S|``
    symmetric difference of a fixed target halfplane."""
    net_n = math.ceil(4 / eps * math.log(2 / delta0))
    p, q = (0.15, 0.35), (0.85, 0.65)  # target: closed side left of p -> q
    rows, passed = [], 0
    for t in range(trials):
        rng = split_rng(seed, "trial", t)
        pts = rng.random((m, 2))
        target = orient_sign(p[0], p[1], q[0], q[1], pts[:, 0], pts[:, 1]) >= 0
        net = np.unique(pts[rng.integers(0, m, net_n)], axis=0)
        i, j = np.triu_indices(len(net), k=1)
        sgn = orient_sign(net[i, 0][:, None], net[i, 1][:, None], net[j, 0][:, None], net[j, 1][:, None],
                          pts[None, :, 0], pts[None, :, 1])
        left = (sgn >= 0) != target
        right = (sgn <= 0) != target
        best = int(min(left.sum(axis=1).min(), right.sum(axis=1).min()))
        ok = best <= eps * m
        passed += ok
        rows.append({"trial": t, "net": net_n, "best_symdiff": best, "ok": ok})
    return CheckResult("refset", passed, trials, rows, {"net_size": net_n}, required=threshold)


def verify_amplify(seed: int = 0, trials: int = 200, eps: float = 0.3, delta: float = 0.05,
                   p_good: float = 2 / 3, max_failure: float = 0.10) -> CheckResult:
    """Stub base learner: perfect with probability ``p_good``, terrible otherwise."""
    concept = PlantedConcept.triangle()
    good = concept.hull
    bad = ConvexPolygon(np.array([(0.0, 0.95), (0.05, 0.95), (0.0, 1.0)]))

    def base(e, rng):
        return Hypothesis("kgon", polygon=good if rng.random() < p_good else bad, k=3)

    rows, fails = [], 0
    for t in range(trials):
        src = ExampleSource.planted(concept, 0.0, seed=int(split_rng(seed, "trial", t).integers(2 ** 62)))
        h = amplify(base, eps, delta, src, rng=split_rng(seed, "learner", t))
        bad_out = h.polygon is bad
        fails += bad_out
        rows.append({"trial": t, "chosen": h.info["chosen"], "failed": bad_out})
    return CheckResult("amplify", trials - fails, trials, rows, {"failure_rate": fails / trials},
                       required=1.0 - max_failure)


SUITES: dict[str, Callable[..., CheckResult]] = {
    "disc": verify_disc,
    "claim": verify_claim,
    "kgon-oracle": verify_kgon_oracle,
    "island-oracle": verify_island_oracle,
    "refset": verify_refset,
    "amplify": verify_amplify,
}


# ---------------------------------------------------------------- statistics

def missing_area(seed: int = 0, ells: Sequence[int] = (100, 1000, 10000), trials: int = 30,
                 radius: float = DISK_AREA_028_RADIUS) -> CheckResult:
    """Median uncovered area of a disk by the hull of the uniform points landing in it.

    The hull lies inside the disk, so the uncovered mass is exactly the disk
    area minus the hull area.
    """
    disk = PlantedConcept.disk((0.5, 0.5), radius)
    rows, medians = [], []
    for ell in ells:
        vals = []
        for t in range(trials):
            rng = split_rng(seed, "trial", ell, t)
            pts = rng.random((ell, 2))
            inside = pts[disk.contains(pts)]
            hull_area = 0.0
            if len(inside) >= 3:
                idx = hull_indices(inside)
                if len(idx) >= 3:
                    hull_area = abs(shoelace_area(inside[idx]))
            vals.append(disk.area() - hull_area)
        med = float(np.median(vals))
        medians.append(med)
        rows.append({"ell": ell, "median_missing": med, "mean_missing": float(np.mean(vals)),
                     "trials": trials})
    slope = fit_loglog(ells, medians) if len(ells) >= 2 else float("nan")
    ok = -0.78 <= slope <= -0.55
    return CheckResult("missing-area", int(ok), 1, rows, {"slope": slope, "target": -2 / 3})


def valtr(seed: int = 0, ns: Sequence[int] = (1000,), trials: int = 50, lam: float = 7.0,
          required: float = 0.9) -> CheckResult:
    """Largest island hull of a uniform net against ``lam * n^(1/3)``."""
    rows, passed, total = [], 0, 0
    means = []
    for n in ns:
        counts = []
        for t in range(trials):
            v = max_island_vertices(sample_uniform_net(n, split_rng(seed, "net", n, t)))
            ok = v <= vertex_bound(n, lam)
            passed += ok
            total += 1
            counts.append(v)
            rows.append({"n": n, "trial": t, "vertices": v, "bound": vertex_bound(n, lam), "ok": ok})
        means.append(float(np.mean(counts)))
    extra = {"bound_lambda": lam}
    if len(ns) >= 2:
        extra["exponent"] = fit_loglog(ns, means)
    return CheckResult("valtr", passed, total, rows, extra, required=required)


STATS = {"missing-area": missing_area, "valtr": valtr}


# ---------------------------------------------------------------- benchmarks

@dataclass
class BenchResult:
    target: str
    sizes: list[int]
    seconds: list[float]
    exponent: float
    rows: list[dict] = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def _best_time(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _finish(target, sizes, secs, extra=None) -> BenchResult:
    exp = fit_loglog(sizes, secs) if len(sizes) >= 2 else float("nan")
    rows = [{"size": s, "seconds": t} for s, t in zip(sizes, secs)]
    return BenchResult(target, list(sizes), secs, exp, rows, extra or {})


def bench_index_build(sizes: Sequence[int] = (1000, 2000, 4000, 8000), seed: int = 0,
                      repeats: int = 2) -> BenchResult:
    """Index construction with a net of about sqrt(|S|) points, so the number
    of registered lines grows linearly with |S| and the table quadratically."""
    secs = []
    for m in sizes:
        rng = make_rng(seed, m)
        S = LabeledPointSet(rng.random((m, 2)), rng.integers(0, 2, m))
        lines = pair_lines(rng.random((max(3, round(math.sqrt(m))), 2)))
        secs.append(_best_time(lambda: LineAnchoredIndex(S, lines), repeats))
    return _finish("index-build", sizes, secs)


def bench_index_query(sizes: Sequence[int] = (1000, 2000, 4000, 8000), seed: int = 0, queries: int = 20000,
                      repeats: int = 2) -> BenchResult:
    """Batched triangle queries on a fixed 20-point net as |S| grows."""
    secs = []
    for m in sizes:
        rng = make_rng(seed, m)
        S = LabeledPointSet(rng.random((m, 2)), rng.integers(0, 2, m))
        N = rng.random((20, 2))
        idx = LineAnchoredIndex(S, pair_lines(N))
        tri = np.array([rng.choice(20, 3, replace=False) for _ in range(queries)])
        V = N[tri]
        cw = ((V[:, 1, 0] - V[:, 0, 0]) * (V[:, 2, 1] - V[:, 0, 1])
              - (V[:, 1, 1] - V[:, 0, 1]) * (V[:, 2, 0] - V[:, 0, 0])) < 0
        V[cw] = V[cw][:, ::-1]
        ids = np.array([[idx.line_id((V[q, e], V[q, (e + 1) % 3])) for e in range(3)] for q in range(queries)])
        secs.append(_best_time(lambda: idx.disc_batch_lines(V, ids), repeats) / queries)
    return _finish("index-query", sizes, secs, {"unit": "seconds per query"})


def bench_kgon(sizes: Sequence[int] = (8, 10, 12, 14), seed: int = 0, m: int = 1000,
               repeats: int = 1) -> BenchResult:
    """Approximate ERM for triangles as the net grows (|S| fixed)."""
    secs = []
    for n in sizes:
        rng = make_rng(seed, n)
        S = LabeledPointSet(rng.random((m, 2)), rng.integers(0, 2, m))
        net = NetSample(rng.random((n, 2)), np.arange(n))
        secs.append(_best_time(lambda: approximate_erm_kgon(S, 0.1, 3, net=net), repeats))
    return _finish("kgon", sizes, secs)


def bench_island(sizes: Sequence[int] = (50, 100, 200), seed: int = 0, m: int = 50,
                 repeats: int = 10) -> BenchResult:
    """Island pipeline (triangle table plus DP) on a small fixed sample, so
    the cubic search dominates."""
    secs = []
    for n in sizes:
        rng = make_rng(seed, n)
        S = LabeledPointSet(rng.random((m, 2)), rng.integers(0, 2, m))
        N = rng.random((n, 2))
        counter = ExhaustiveCounter(S)

        def run():
            opt_island(N, build_triangle_table(N, counter), validate=False)

        secs.append(_best_time(run, repeats))
    return _finish("island", sizes, secs, {"sample_size": m})


def enumeration_counts(ns: Sequence[int] = (8, 10, 12), k: int = 3, seed: int = 0) -> CheckResult:
    """Reference k-gon enumeration against the C(2 C(n, 2), k) tuple bound."""
    rows, passed = [], 0
    for n in ns:
        pts = sample_uniform_net(n, make_rng(seed, n))
        hs = induced_halfplanes(pts)
        st = EnumerationStats()
        for _ in enumerate_reference_kgons(hs, k, st):
            pass
        bound = math.comb(2 * math.comb(n, 2), k)
        ok = bound / 2 <= st.examined <= 2 * bound
        passed += ok
        rows.append({"n": n, "halfplanes": len(hs), "examined": st.examined, "bounded": st.bounded,
                     "distinct": st.yielded, "bound": bound, "ratio": st.examined / bound,
                     "distinct_ratio": st.yielded / bound, "ok": ok})
    return CheckResult("enumeration", passed, len(ns), rows)


BENCHES = {"index-build": bench_index_build, "index-query": bench_index_query, "kgon": bench_kgon,
           "island": bench_island}
