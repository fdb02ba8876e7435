"""Learning a triangle from noisy labels.

Points are uniform on the unit square; a planted triangle labels them and
20% of labels are flipped at random. The best achievable error is 0.2, and
the learner promises at most 0.2 + eps with probability 1 - delta.
"""
from pathlib import Path

import numpy as np

from agnostic2d.data import ExampleSource, PlantedConcept
from agnostic2d.meta import learn_kgon
from agnostic2d.render import render_svg

eps, delta, eta = 0.2, 0.1, 0.2
concept = PlantedConcept.triangle()
source = ExampleSource.planted(concept, eta, seed=42)

h = learn_kgon(eps, delta, 3, source, rng=7, net_n=18)
print(f"drew {source.drawn} examples over {h.info['t']} runs plus validation")
print("validation errors per run:", [round(e, 3) for e in h.info["validation_errors"]])

probe = np.random.default_rng(0).random((100_000, 2))
disagree = np.mean(h.evaluate(probe) != concept.contains(probe))
print(f"disagreement with the planted triangle: {disagree:.4f}")
print(f"true error under noise: {eta + (1 - 2 * eta) * disagree:.4f} (target <= {eta + eps})")

out = Path(__file__).with_name("triangle.svg")
out.write_text(render_svg(source.spawn(1).draw(1500), h.vertices, title="learned triangle"))
print("picture written to", out)
