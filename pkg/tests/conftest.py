from __future__ import annotations

import random
from fractions import Fraction as F
from pathlib import Path

import pytest

from ultratree.duality import tree_of
from ultratree.endmaps import EndMap
from ultratree.generators import random_space, random_tree
from ultratree.ultrametric import FiniteUltrametricSpace

DATA = Path(__file__).parent / "data"


def make_s3() -> FiniteUltrametricSpace:
    h, q = F(1, 2), F(1, 4)
    return FiniteUltrametricSpace(["a", "b", "c"], [[0, h, h], [h, 0, q], [h, q, 0]])


def make_s3_prime() -> FiniteUltrametricSpace:
    h = F(1, 2)
    return FiniteUltrametricSpace(["a", "b", "c"], [[0, h, h], [h, 0, h], [h, h, 0]])


@pytest.fixture
def s3():
    return make_s3()


@pytest.fixture
def s3_prime():
    return make_s3_prime()


@pytest.fixture
def s3_tree():
    return tree_of(make_s3())


@pytest.fixture
def s3_map():
    """Pointwise-labelled map S3 -> S3' (b and c pulled apart to 1/2)."""
    return EndMap(make_s3(), make_s3_prime(), {"a": "a", "b": "b", "c": "c"})


@pytest.fixture
def data_dir():
    return DATA


def seeded_spaces(seed: int, count: int, max_points: int = 16):
    rng = random.Random(seed)
    return [random_space(rng, rng.randint(1, max_points)) for _ in range(count)]


def seeded_trees(seed: int, count: int, **kw):
    rng = random.Random(seed)
    return [random_tree(rng, **kw) for _ in range(count)]
