import json
import warnings

import numpy as np
import pytest

from agnostic2d.data import (
    ExampleSource,
    GeneralPositionWarning,
    PlantedConcept,
    load_dataset,
    load_metadata,
    make_rng,
    planted_by_name,
    save_dataset,
    split_rng,
)
from agnostic2d.disc import LabeledPointSet
from agnostic2d.errors import FileExhausted, ParseError, ValidationError
from agnostic2d.geom import orientation


def test_planted_triangle_positive_fraction():
    c = PlantedConcept.triangle((0, 0), (1, 0), (0, 1))
    S = ExampleSource.planted(c, 0.0, seed=1).draw(100_000)
    assert abs(S.positives / len(S) - 0.5) < 0.01


def test_pure_noise_labels():
    c = PlantedConcept.triangle((0, 0), (1, 0), (0, 1))
    S = ExampleSource.planted(c, 0.5, seed=2).draw(100_000)
    assert abs(S.positives / len(S) - 0.5) < 0.01
    inside = c.contains(S.points)
    # labels independent of position
    assert abs(S.labels[inside].mean() - 0.5) < 0.015
    assert abs(S.labels[~inside].mean() - 0.5) < 0.015


def test_determinism_and_distinct_seeds():
    c = planted_by_name("disk")
    a = ExampleSource.planted(c, 0.1, seed=5).draw(100)
    b = ExampleSource.planted(c, 0.1, seed=5).draw(100)
    d = ExampleSource.planted(c, 0.1, seed=6).draw(100)
    assert np.array_equal(a.points, b.points) and np.array_equal(a.labels, b.labels)
    assert not np.array_equal(a.points, d.points)


def test_noise_free_labels_match_closed_containment():
    c = PlantedConcept.kgon(k=5)
    S = ExampleSource.planted(c, 0.0, seed=3).draw(2000)
    v = c.vertices
    for p, y in zip(S.points[:300], S.labels[:300]):
        inside = all(orientation(v[i], v[(i + 1) % 5], p) >= 0 for i in range(5))
        assert bool(y) == inside
    assert np.array_equal(S.labels.astype(bool), c.contains(S.points))


def test_boundary_points_are_inside():
    c = PlantedConcept.triangle((0, 0), (1, 0), (0, 1))
    assert c.contains([(0.5, 0.5), (0, 0), (0.25, 0)]).all()
    d = PlantedConcept.disk((0.5, 0.5), 0.25)
    assert d.contains([(0.75, 0.5), (0.5, 0.25)]).all()
    assert not d.contains([(0.75 + 1e-15, 0.5)]).any()


def test_realised_noise_rate():
    c = PlantedConcept.triangle()
    src = ExampleSource.planted(c, 0.2, seed=4)
    S = src.draw(100_000)
    flipped = S.labels.astype(bool) != c.contains(S.points)
    assert abs(flipped.mean() - 0.2) < 0.01


def test_invalid_parameters():
    with pytest.raises(ValueError):
        ExampleSource.planted(PlantedConcept.triangle(), 0.6)
    with pytest.raises(ValueError):
        PlantedConcept.disk((0.5, 0.5), 0.6)
    with pytest.raises(ValueError):
        PlantedConcept.kgon([(0.1, 0.1), (0.9, 0.1), (0.5, 0.5), (0.5, 0.2)])
    with pytest.raises(ValueError):
        ExampleSource.planted(PlantedConcept.triangle()).draw(-1)


def test_constant_source():
    S = ExampleSource.constant(0, seed=1).draw(50)
    assert S.positives == 0 and len(S) == 50
    assert ExampleSource.constant(1, seed=1).draw(10).positives == 10


def test_streams_split():
    a = split_rng(1, "trial", 0).random(5)
    b = split_rng(1, "trial", 1).random(5)
    c = split_rng(1, "net").random(5)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)
    assert np.array_equal(make_rng(1, 7, 0).random(5), a)
    src = ExampleSource.planted(PlantedConcept.triangle(), seed=9)
    x, y = src.spawn(0).draw(20), src.spawn(1).draw(20)
    assert not np.array_equal(x.points, y.points)
    assert np.array_equal(src.spawn(0).draw(20).points, x.points)
    assert src.metadata()["rng"].startswith("numpy.Philox")


def test_load_format_example(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("0.25,0.75,1\n0.5,0.5,0\n")
    S = load_dataset(f)
    assert len(S) == 2 and S.positives == 1


def test_comments_and_blank_lines(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("# x,y,label\n\n0.1,0.2,1\n  # note\n0.3,0.4,0\n")
    assert len(load_dataset(f)) == 2


def test_parse_error_line_number(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("0.1,abc,1\n")
    with pytest.raises(ParseError) as e:
        load_dataset(f)
    assert e.value.line == 1
    f.write_text("# header\n0.1,0.2,1\n0.1,0.2\n")
    with pytest.raises(ParseError) as e:
        load_dataset(f)
    assert e.value.line == 3


def test_validation_error_lists_rows(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("0.1,0.2,2\n0.3,0.4,1\n0.5,0.6,7\n")
    with pytest.raises(ValidationError) as e:
        load_dataset(f)
    assert e.value.rows == [1, 3]
    f.write_text("nan,0.2,1\n0.3,inf,1\n")
    with pytest.raises(ValidationError) as e:
        load_dataset(f)
    assert e.value.rows == [1, 2]


def test_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    S = LabeledPointSet(rng.random((1000, 2)), rng.integers(0, 2, 1000))
    f = save_dataset(S, tmp_path / "r.csv", metadata={"seed": 3})
    T = load_dataset(f)
    assert S.same_multiset(T)
    assert np.array_equal(S.points, T.points)
    assert load_metadata(f) == {"seed": 3}
    assert json.loads((tmp_path / "r.csv.json").read_text())["seed"] == 3


def test_general_position_warning(tmp_path):
    f = tmp_path / "g.csv"
    f.write_text("0,0,1\n0.5,0.5,0\n1,1,1\n0,1,0\n")
    with pytest.warns(GeneralPositionWarning):
        S = load_dataset(f)
    assert len(S) == 4
    f.write_text("0,0,1\n0.5,0.4,0\n1,1,1\n")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        load_dataset(f)


def test_file_source(tmp_path):
    rng = np.random.default_rng(1)
    S = LabeledPointSet(rng.random((30, 2)), rng.integers(0, 2, 30))
    f = save_dataset(S, tmp_path / "s.csv")
    src = ExampleSource.from_file(f)
    assert not src.uniform
    a = src.draw(20)
    assert np.array_equal(a.points, S.points[:20])
    with pytest.raises(FileExhausted):
        src.draw(11)
    rep = ExampleSource.from_file(f, replace=True, assert_uniform=True, seed=2)
    assert rep.uniform and len(rep.draw(100)) == 100


def test_concept_description_round_trip():
    for name in ("triangle", "kgon", "polygon", "disk"):
        c = planted_by_name(name)
        d = PlantedConcept.from_description(json.loads(json.dumps(c.describe())))
        pts = np.random.default_rng(0).random((500, 2))
        assert np.array_equal(c.contains(pts), d.contains(pts))
        assert 0 < c.area() < 1
