from __future__ import annotations

import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultratree.errors import InputError, ValidationFailure
from ultratree.generators import random_space
from ultratree.ultrametric import (
    FiniteUltrametricSpace,
    ball,
    isosceles_witness,
    partition_at,
    validate_ultrametric,
)


def brute_triangle_violations(labels, rows):
    """Independent oracle: every ordered (x, z, y), x < y, breaking the strong triangle law."""
    out = set()
    n = len(labels)
    for x, y, z in itertools.product(range(n), repeat=3):
        if x < y and z not in (x, y) and rows[x][y] > max(rows[x][z], rows[z][y]):
            out.add((labels[x], labels[z], labels[y]))
    return out


def test_s3_is_valid(s3):
    assert validate_ultrametric(s3.labels, s3.matrix()).ok


def test_broken_triangle_reported_with_witness():
    rows = [[0, F(1, 2), F(1, 8)], [F(1, 2), 0, F(1, 4)], [F(1, 8), F(1, 4), 0]]
    report = validate_ultrametric(["a", "b", "c"], rows)
    assert not report.ok
    (v,) = report.triangles()
    assert v.labels == ("a", "c", "b")
    assert v.values == (F(1, 2), F(1, 8), F(1, 4))
    assert v.describe() == "triangle at (a,c,b): 1/2 > max(1/8,1/4)"


def test_single_point_is_valid():
    assert validate_ultrametric(["a"], [[0]]).ok
    assert len(FiniteUltrametricSpace(["a"], [[0]])) == 1


@pytest.mark.parametrize(
    "rows, kind",
    [
        ([[0, F(1, 2)], [F(1, 4), 0]], "asymmetry"),
        ([[0, 0], [0, 0]], "zero"),
        ([[0, 2], [2, 0]], "diameter"),
        ([[0, -1], [-1, 0]], "negative"),
        ([[1, F(1, 2)], [F(1, 2), 0]], "diagonal"),
    ],
)
def test_axiom_breaches(rows, kind):
    report = validate_ultrametric(["a", "b"], rows)
    assert kind in {v.kind for v in report.violations}


@pytest.mark.parametrize(
    "labels, rows",
    [
        (["a", "b"], [[0, 1]]),
        (["a", "b"], [[0, "x"], ["x", 0]]),
        (["a", "b"], [[0, 0.5], [0.5, 0]]),
        (["a", "a"], [[0, 1], [1, 0]]),
    ],
)
def test_malformed_matrix_is_input_error(labels, rows):
    with pytest.raises(InputError):
        validate_ultrametric(labels, rows)


def test_input_error_is_not_validation_failure():
    with pytest.raises(ValidationFailure) as exc:
        FiniteUltrametricSpace(["a", "b", "c"], [[0, F(1, 2), F(1, 8)], [F(1, 2), 0, F(1, 4)], [F(1, 8), F(1, 4), 0]])
    assert not isinstance(exc.value, InputError)
    assert exc.value.report.triangles()


def test_empty_space_rejected():
    with pytest.raises(InputError):
        FiniteUltrametricSpace([], [])


def test_from_pairs_requires_every_pair():
    with pytest.raises(InputError):
        FiniteUltrametricSpace.from_pairs(["a", "b", "c"], [("a", "b", "1/2")])
    space = FiniteUltrametricSpace.from_pairs(["b", "a"], [("a", "b", "1/2")])
    assert space.labels == ("a", "b")


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10**6))
def test_validator_matches_brute_force(n, seed):
    rng = random.Random(seed)
    values = [F(k, 8) for k in range(1, 9)]
    rows = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = rng.choice(values)
    labels = [f"x{i}" for i in range(n)]
    found = {v.labels for v in validate_ultrametric(labels, rows).triangles()}
    assert found == brute_triangle_violations(labels, rows)


def test_balls_on_s3(s3):
    assert ball(s3, "b", F(1, 4)) == {"b", "c"}
    assert ball(s3, "b", 1) == {"a", "b", "c"}
    assert ball(s3, "a", F(1, 8)) == {"a"}
    assert ball(s3, "b", F(1, 4), closed=False) == {"b"}
    with pytest.raises(InputError):
        ball(s3, "zz", 1)


def test_partition_on_s3(s3):
    assert partition_at(s3, F(1, 4)) == [("a",), ("b", "c")]
    assert partition_at(s3, F(1, 2)) == [("a", "b", "c")]
    assert partition_at(s3, 0) == [("a",), ("b",), ("c",)]


def test_isosceles_on_s3(s3):
    tri = isosceles_witness(s3, "a", "b", "c")
    assert tri.kind == "isosceles"
    assert set(tri.long_sides) == {("a", "b"), ("a", "c")}
    assert tri.long_value == F(1, 2)
    assert tri.short_side == ("b", "c") and tri.short_value == F(1, 4)


def test_equilateral(s3_prime):
    assert isosceles_witness(s3_prime, "a", "b", "c").kind == "equilateral"


def test_isosceles_repeated_points(s3):
    with pytest.raises(InputError):
        isosceles_witness(s3, "a", "a", "b")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 20))
def test_balls_partition_and_any_member_is_a_center(seed, n):
    rng = random.Random(seed)
    space = random_space(rng, n, max_den=64)
    radii = [F(0), F(1)] + space.distance_values() + [F(rng.randint(0, 64), 64)]
    for r in radii:
        blocks = partition_at(space, r)
        assert sorted(x for b in blocks for x in b) == sorted(space.labels)
        for block in blocks:
            for member in block:
                assert ball(space, member, r) == frozenset(block)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 12))
def test_largest_side_attained_twice(seed, n):
    space = random_space(random.Random(seed), n, max_den=64)
    for x, y, z in itertools.combinations(space.labels, 3):
        sides = sorted([space.d(x, y), space.d(x, z), space.d(y, z)])
        assert sides[1] == sides[2]
        isosceles_witness(space, x, y, z)
