"""Discrepancy of convex polygons, counted two ways.

A labelled sample S is indexed once per net line; afterwards the signed
count (#positives - #negatives) of any polygon whose edges lie on those
lines comes from a few prefix-sum lookups. We compare against a direct scan
and check the link between discrepancy and empirical error.
"""
import numpy as np

from agnostic2d.disc import ExhaustiveCounter, LabeledPointSet, LineAnchoredIndex, err_from_disc, pair_lines
from agnostic2d.geom import convex_hull

rng = np.random.default_rng(1)
S = LabeledPointSet(rng.random((2000, 2)), rng.integers(0, 2, 2000))
net = rng.random((12, 2))

index = LineAnchoredIndex(S, pair_lines(net))
scan = ExhaustiveCounter(S)

print(f"|S| = {len(S)}, positives = {S.positives}, net lines = {len(pair_lines(net))}")
for trial in range(5):
    P = convex_hull(net[rng.choice(12, size=int(rng.integers(3, 7)), replace=False)])
    a, b = index.disc_polygon(P), scan.disc_polygon(P)
    err = err_from_disc(a, S.positives, len(S))
    print(f"  polygon with {len(P)} vertices: index {a:+d}, scan {b:+d}, empirical error {float(err):.4f}")
    assert a == b
