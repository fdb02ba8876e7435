"""Proper agnostic learners for planar k-gons and convex sets."""
from .disc import LabeledPointSet, build_counter, err_from_disc
from .errors import Agnostic2DError, AlgorithmFailure, DataError
from .geom import ConvexPolygon, Halfplane, convex_hull, halfplane_intersection, orientation
from .meta import Hypothesis, distance_estimate, learn_convex, learn_kgon

__version__ = "0.1.0"

__all__ = [
    "Agnostic2DError", "AlgorithmFailure", "ConvexPolygon", "DataError", "Halfplane", "Hypothesis",
    "LabeledPointSet", "build_counter", "convex_hull", "distance_estimate", "err_from_disc",
    "halfplane_intersection", "learn_convex", "learn_kgon", "orientation",
]
