"""Seeded example sources and CSV persistence.

Randomness comes from numpy's Philox counter-based generator keyed by a
:class:`numpy.random.SeedSequence`; named sub-streams are derived with
:func:`split_rng`, so a run replays exactly from its seed on any platform.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .disc import LabeledPointSet
from .errors import FileExhausted, ParseError, ValidationError
from .geom import (
    ConvexPolygon,
    as_points,
    check_general_position,
    hull_indices,
    points_in_polygon_mask,
    shoelace_area,
)

RNG_ALGORITHM = "numpy.Philox4x64-10/SeedSequence"
GP_CHECK_LIMIT = 2000

_STREAMS = {"sample": 1, "net": 2, "validate": 3, "noise": 4, "learner": 5, "probe": 6, "trial": 7}


def make_rng(seed: int | None, *stream: int) -> np.random.Generator:
    """Philox generator for ``seed`` and an optional integer stream path."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def split_rng(seed: int | None, name: str, *index: int) -> np.random.Generator:
    """Independent named stream, e.g. ``split_rng(7, "trial", 3)``."""
    if name not in _STREAMS:
        raise ValueError(f"unknown stream {name!r}")
    return make_rng(seed, _STREAMS[name], *index)


def child_seed(rng: np.random.Generator) -> int:
    """A 63-bit seed drawn from ``rng`` (used to hand streams to sub-tasks)."""
    return int(rng.integers(0, 2 ** 63 - 1))


# ---------------------------------------------------------------- concepts

DISK_AREA_028_RADIUS = math.sqrt(0.28 / math.pi)


def _regular_polygon(k: int, center=(0.5, 0.5), r=0.4, phase=0.3) -> np.ndarray:
    t = phase + 2 * np.pi * np.arange(k) / k
    return np.column_stack([center[0] + r * np.cos(t), center[1] + r * np.sin(t)])


@dataclass(frozen=True)
class PlantedConcept:
    """A convex target inside the unit square: a polygon or a closed disk."""

    shape: str
    vertices: np.ndarray | None = None
    center: tuple[float, float] | None = None
    radius: float | None = None

    @classmethod
    def triangle(cls, a=(0.1, 0.1), b=(0.9, 0.2), c=(0.4, 0.9)) -> "PlantedConcept":
        return cls._polygon("triangle", [a, b, c])

    @classmethod
    def kgon(cls, points=None, k: int = 4) -> "PlantedConcept":
        return cls._polygon("kgon", _regular_polygon(k) if points is None else points)

    @classmethod
    def polygon(cls, points=None) -> "PlantedConcept":
        return cls._polygon("polygon", _regular_polygon(7) if points is None else points)

    @classmethod
    def disk(cls, center=(0.5, 0.5), radius: float = 0.3) -> "PlantedConcept":
        c = (float(center[0]), float(center[1]))
        if radius <= 0 or c[0] - radius < 0 or c[1] - radius < 0 or c[0] + radius > 1 or c[1] + radius > 1:
            raise ValueError("disk must lie inside the unit square")
        return cls("disk", None, c, float(radius))

    @classmethod
    def _polygon(cls, shape: str, points) -> "PlantedConcept":
        pts = as_points(points)
        if len(pts) < 3:
            raise ValueError("a planted polygon needs at least 3 vertices")
        if ((pts < 0) | (pts > 1)).any():
            raise ValueError("planted polygon must lie inside the unit square")
        hi = hull_indices(pts)
        if len(hi) != len(pts):
            raise ValueError("planted polygon vertices must be in convex position")
        return cls(shape, pts[hi].copy())

    @property
    def hull(self) -> ConvexPolygon | None:
        return None if self.vertices is None else ConvexPolygon(self.vertices, check=False)

    @property
    def k(self) -> int | None:
        return None if self.vertices is None else len(self.vertices)

    def area(self) -> float:
        if self.shape == "disk":
            return math.pi * self.radius ** 2
        return abs(shoelace_area(self.vertices))

    def contains(self, points) -> np.ndarray:
        """Boundary-inclusive membership, exact."""
        pts = as_points(points)
        if self.shape != "disk":
            return points_in_polygon_mask(self.hull, pts)
        return _in_disk(pts, self.center, self.radius)

    def describe(self) -> dict:
        if self.shape == "disk":
            return {"shape": "disk", "center": list(self.center), "radius": self.radius}
        return {"shape": self.shape, "vertices": self.vertices.tolist()}

    @classmethod
    def from_description(cls, d: dict) -> "PlantedConcept":
        if d["shape"] == "disk":
            return cls.disk(d["center"], d["radius"])
        return cls._polygon(d["shape"], d["vertices"])


def _in_disk(pts: np.ndarray, center, radius) -> np.ndarray:
    dx = pts[:, 0] - center[0]
    dy = pts[:, 1] - center[1]
    val = dx * dx + dy * dy - radius * radius
    # settle the rare near-boundary cases with rationals
    tol = 8 * np.finfo(float).eps * (dx * dx + dy * dy + radius * radius + 1.0)
    out = val <= 0
    cx, cy, r = Fraction(center[0]), Fraction(center[1]), Fraction(radius)
    for i in np.nonzero(np.abs(val) <= tol)[0]:
        ex, ey = Fraction(pts[i, 0]) - cx, Fraction(pts[i, 1]) - cy
        out[i] = ex * ex + ey * ey <= r * r
    return out


def planted_by_name(shape: str, k: int = 4) -> PlantedConcept:
    if shape == "triangle":
        return PlantedConcept.triangle()
    if shape == "kgon":
        return PlantedConcept.kgon(k=k)
    if shape == "polygon":
        return PlantedConcept.polygon()
    if shape == "disk":
        return PlantedConcept.disk()
    raise ValueError(f"unknown shape {shape!r}")


# ---------------------------------------------------------------- sources

@dataclass
class ExampleSource:
    """Pull-based stream of labelled examples.

    ``kind`` is ``planted`` (concept plus label noise ``eta``), ``constant``
    (every label equal to ``bit``) or ``file`` (rows of a dataset, read in
    order, or resampled with replacement when ``replace`` is set). Planted
    and constant sources have the uniform marginal on the unit square; file
    sources only claim it when ``assert_uniform`` is set.
    """

    kind: str
    seed: int | None = None
    concept: PlantedConcept | None = None
    eta: float = 0.0
    bit: int = 0
    data: LabeledPointSet | None = None
    path: str | None = None
    replace: bool = False
    assert_uniform: bool = False
    stream: tuple[int, ...] = ()
    drawn: int = field(default=0, init=False)

    def __post_init__(self):
        if self.kind not in ("planted", "constant", "file"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if not 0.0 <= self.eta <= 0.5:
            raise ValueError("noise rate must lie in [0, 1/2]")
        if self.kind == "planted" and self.concept is None:
            raise ValueError("planted source needs a concept")
        if self.kind == "file" and self.data is None:
            raise ValueError("file source needs data")
        if self.bit not in (0, 1):
            raise ValueError("constant label must be 0 or 1")
        self._rng = make_rng(self.seed, *self.stream)
        self._cursor = 0

    @classmethod
    def planted(cls, concept: PlantedConcept, eta: float = 0.0, seed: int | None = None) -> "ExampleSource":
        return cls("planted", seed, concept=concept, eta=eta)

    @classmethod
    def constant(cls, bit: int = 0, seed: int | None = None) -> "ExampleSource":
        return cls("constant", seed, bit=bit)

    @classmethod
    def from_file(cls, path, *, replace: bool = False, assert_uniform: bool = False,
                  seed: int | None = None) -> "ExampleSource":
        return cls("file", seed, data=load_dataset(path), path=str(path), replace=replace,
                   assert_uniform=assert_uniform)

    @property
    def uniform(self) -> bool:
        return self.kind != "file" or self.assert_uniform

    def labels_for(self, points) -> np.ndarray:
        """Noise-free labels (planted and constant sources)."""
        pts = as_points(points)
        if self.kind == "planted":
            return self.concept.contains(pts)
        if self.kind == "constant":
            return np.full(len(pts), bool(self.bit))
        raise TypeError("file sources have no labelling function")

    def draw(self, m: int) -> LabeledPointSet:
        if m < 0:
            raise ValueError("m must be non-negative")
        self.drawn += m
        if self.kind == "file":
            return self._draw_file(m)
        pts = self._rng.random((m, 2))
        y = self.labels_for(pts)
        if self.kind == "planted" and self.eta > 0:
            y = y ^ (self._rng.random(m) < self.eta)
        return LabeledPointSet(pts, y)

    def _draw_file(self, m: int) -> LabeledPointSet:
        n = len(self.data)
        if self.replace:
            if n == 0 and m > 0:
                raise FileExhausted("cannot resample from an empty file")
            return self.data.subset(self._rng.integers(0, n, m))
        if self._cursor + m > n:
            raise FileExhausted(f"requested {m} rows, {n - self._cursor} left in {self.path}")
        out = self.data.subset(np.arange(self._cursor, self._cursor + m))
        self._cursor += m
        return out

    def spawn(self, i: int) -> "ExampleSource":
        """Independent child stream ``i``; file children share the rows but keep
        their own cursor."""
        return ExampleSource(self.kind, self.seed, concept=self.concept, eta=self.eta, bit=self.bit,
                             data=self.data, path=self.path, replace=self.replace,
                             assert_uniform=self.assert_uniform, stream=self.stream + (int(i),))

    def metadata(self) -> dict:
        meta = {"seed": self.seed, "rng": RNG_ALGORITHM, "stream": list(self.stream), "source": self.kind,
                "noise": self.eta}
        if self.kind == "planted":
            meta["concept"] = self.concept.describe()
        elif self.kind == "constant":
            meta["concept"] = {"shape": "constant", "label": self.bit}
        else:
            meta["concept"] = {"shape": "file", "path": self.path}
        return meta


# ---------------------------------------------------------------- files

class GeneralPositionWarning(UserWarning):
    """Loaded points contain duplicates or collinear triples."""


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def save_dataset(S: LabeledPointSet, path, metadata: dict | None = None) -> Path:
    """Write ``x,y,label`` rows (shortest round-trip decimals) and, when
    ``metadata`` is given, a JSON sidecar next to the file."""
    path = Path(path)
    lines = ["# x,y,label"]
    lines += [f"{float(x)!r},{float(y)!r},{int(lab)}" for (x, y), lab in zip(S.points, S.labels)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    if metadata is not None:
        _sidecar(path).write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_metadata(path) -> dict | None:
    side = _sidecar(Path(path))
    return json.loads(side.read_text(encoding="utf-8")) if side.exists() else None


def parse_dataset(text: str) -> LabeledPointSet:
    xs: list[float] = []
    ys: list[float] = []
    labels: list[int] = []
    bad_label: list[int] = []
    bad_coord: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ParseError(lineno, f"expected 3 fields, got {len(parts)}")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(lineno, f"bad coordinate in {line!r}") from None
        try:
            lab = int(parts[2])
        except ValueError:
            raise ParseError(lineno, f"bad label {parts[2]!r}") from None
        if lab not in (0, 1):
            bad_label.append(lineno)
        if not (math.isfinite(x) and math.isfinite(y)):
            bad_coord.append(lineno)
        xs.append(x)
        ys.append(y)
        labels.append(lab)
    if bad_label:
        raise ValidationError(bad_label, "labels must be 0 or 1")
    if bad_coord:
        raise ValidationError(bad_coord, "coordinates must be finite")
    if not xs:
        return LabeledPointSet.empty()
    return LabeledPointSet(np.column_stack([xs, ys]), labels)


def load_dataset(path, *, check_position: bool = True) -> LabeledPointSet:
    """Read a dataset file. Duplicate or collinear points only warn (checked
    for files of at most ``GP_CHECK_LIMIT`` rows)."""
    S = parse_dataset(Path(path).read_text(encoding="utf-8"))
    if check_position and 3 <= len(S) <= GP_CHECK_LIMIT:
        bad = check_general_position(S.points)
        if bad:
            warnings.warn(f"{path}: {len(bad)} degenerate triple(s), first {bad[0]}", GeneralPositionWarning,
                          stacklevel=2)
    return S
