from __future__ import annotations

import json
import random

import pytest

from ultratree.errors import InputError
from ultratree.generators import random_tree
from ultratree.morphisms import RadialTreeMap, induce_tree_map, random_compatible_reparams
from ultratree.serialization import (
    detect_kind,
    dumps,
    endmap_from_json,
    endmap_to_json,
    radial_from_json,
    radial_to_json,
    read_json,
    space_from_json,
    space_to_json,
    tree_from_json,
    tree_to_dot,
    tree_to_json,
)


def test_space_roundtrip(s3, data_dir):
    loaded = space_from_json(read_json(data_dir / "s3.json"))
    assert loaded == s3
    assert space_from_json(json.loads(dumps(space_to_json(s3)))) == s3


def test_canonical_output_sorts_labels():
    obj = {"points": ["z", "a"], "distances": [["z", "a", "1/2"]]}
    assert space_to_json(space_from_json(obj))["points"] == ["a", "z"]


def test_missing_pair_is_error():
    with pytest.raises(InputError):
        space_from_json({"points": ["a", "b"], "distances": []})


def test_float_distance_is_error():
    with pytest.raises(InputError):
        space_from_json({"points": ["a", "b"], "distances": [["a", "b", 0.5]]})


def test_tree_roundtrip_and_int_ids():
    obj = {
        "nodes": [{"id": 0, "level": "1", "children": [1, 2]}, {"id": 1, "level": "1/2"}, {"id": 2, "level": "1/3"}],
        "leaves": {"1": "RAY", "2": "TIP"},
    }
    tree = tree_from_json(obj)
    assert tree.rays == ("1",) and tree.tips == ("2",)
    assert tree_from_json(tree_to_json(tree)) == tree


def test_random_tree_roundtrip():
    rng = random.Random(3)
    for _ in range(10):
        tree = random_tree(rng)
        assert tree_from_json(json.loads(dumps(tree_to_json(tree)))) == tree


def test_endmap_and_radial_roundtrip(s3_map):
    assert endmap_from_json(endmap_to_json(s3_map)) == s3_map
    m = induce_tree_map(s3_map)
    obj = radial_to_json(m)
    assert "lambda" in obj
    back = radial_from_json(json.loads(dumps(obj)))
    assert back.sigma == m.sigma and all(back.reparam[r].points() == m.reparam[r].points() for r in m.source.rays)
    warped = RadialTreeMap(m.source, m.target, m.sigma, random_compatible_reparams(m, random.Random(1)))
    back = radial_from_json(radial_to_json(warped))
    assert {r: back.reparam[r].points() for r in m.source.rays} == {
        r: warped.reparam[r].points() for r in m.source.rays
    }


def test_detect_kind(s3, s3_map):
    assert detect_kind(space_to_json(s3)) == "ultrametric"
    assert detect_kind(endmap_to_json(s3_map)) == "endmap"
    assert detect_kind({"vertices": [], "edges": []}) == "simplicial"
    with pytest.raises(InputError):
        detect_kind([1, 2])


def test_dumps_is_deterministic(s3):
    assert dumps(space_to_json(s3)) == dumps(space_to_json(s3))


def test_dot(s3_tree):
    dot = tree_to_dot(s3_tree)
    assert dot.startswith('digraph "tree"')
    assert "level 1/4" in dot and "depth 1.386" in dot
    assert dot.count("arrowhead=normal") == 3


def test_read_json_errors(tmp_path):
    with pytest.raises(InputError):
        read_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(InputError):
        read_json(bad)
