"""How far is a labelling from being a triangle?

With 20% random flips around a planted triangle, the distance to the class
of triangles is exactly 0.2; the estimator should land within 0.1 of it.
"""
from agnostic2d.data import ExampleSource, PlantedConcept
from agnostic2d.meta import distance_estimate

for seed in range(3):
    src = ExampleSource.planted(PlantedConcept.triangle(), 0.2, seed=seed)
    est = distance_estimate("kgon", 0.1, 0.1, src, rng=100 + seed, net_n=18)
    print(f"seed {seed}: estimate {float(est.value):.4f} from {est.samples} examples")
