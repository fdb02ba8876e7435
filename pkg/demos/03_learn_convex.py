"""Learning a convex set (a disk) under the uniform marginal.

The learner draws a labelled sample and an independent uniform net, then
searches all convex polygons spanned by net points for the one with the
largest discrepancy. Its hull is kept small: at most 7 n^(1/3) vertices.
"""
import numpy as np

from agnostic2d.data import ExampleSource, PlantedConcept
from agnostic2d.island import vertex_bound
from agnostic2d.meta import learn_convex

disk = PlantedConcept.disk((0.5, 0.5), 0.3)
source = ExampleSource.planted(disk, 0.0, seed=5)
h = learn_convex(0.25, 0.1, source, rng=6)

n = h.info["net_size"]
print(f"net size n = {n}, sample size s = {h.info['sample_size']}")
print(f"hull vertices {len(h.vertices)} (bound {vertex_bound(n):.1f})")
probe = np.random.default_rng(0).random((100_000, 2))
print(f"error vs disk: {np.mean(h.evaluate(probe) != disk.contains(probe)):.4f}")
