from __future__ import annotations

import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultratree.endmaps import EndMap
from ultratree.errors import InputError
from ultratree.generators import random_step_modulus
from ultratree.modulus import ConcaveMajorant, PLMap, StepModulus, concave_majorant, modulus_of, upper_hull

GRID_BITS = 10


def grid_sup_of_chords(rho: StepModulus, bits: int = GRID_BITS) -> np.ndarray:
    """Brute-force oracle: sup over chords of the step graph, sampled on a dyadic grid.

    The value at 1 is raised to 1 first. For each left endpoint i the best chord
    through x_k (k >= i) uses the steepest slope to any right endpoint j >= k.
    """
    n = 2**bits
    xs = np.arange(n + 1) / n
    ys = np.array([float(rho(F(k, n))) for k in range(n + 1)])
    ys[-1] = 1.0
    best = ys.copy()
    for i in range(n):
        dx = xs[i + 1 :] - xs[i]
        slopes = (ys[i + 1 :] - ys[i]) / dx
        suffix = np.maximum.accumulate(slopes[::-1])[::-1]
        best[i + 1 :] = np.maximum(best[i + 1 :], ys[i] + suffix * dx)
    return best


def test_fixture_modulus(s3_map):
    rho = modulus_of(s3_map)
    assert rho.graph_points() == [(0, 0), (F(1, 4), F(1, 2))]
    assert rho(F(1, 5)) == 0 and rho(F(1, 4)) == F(1, 2) and rho(1) == F(1, 2)


def test_fixture_majorant(s3_map):
    lam = concave_majorant(modulus_of(s3_map))
    assert lam.points() == [(0, 0), (F(1, 4), F(1, 2)), (1, 1)]
    for u in [F(k, 64) for k in range(65)]:
        expect = 2 * u if u <= F(1, 4) else F(1, 2) + F(2, 3) * (u - F(1, 4))
        assert lam(u) == expect


def test_identity_modulus(s3):
    rho = modulus_of(EndMap.identity(s3))
    assert rho(F(1, 3)) == F(1, 4) and rho(F(1, 2)) == F(1, 2) and rho(F(1, 8)) == 0


def test_constant_map_majorant_is_identity(s3):
    f = EndMap(s3, s3, {x: "a" for x in s3.labels})
    rho = modulus_of(f)
    assert rho.values == (0,)
    assert concave_majorant(rho) == ConcaveMajorant((F(0), F(1)), (F(0), F(1)))


def test_diagonal_chord_dominates():
    rho = StepModulus.from_steps([(F(1, 2), F(1, 2))])
    assert concave_majorant(rho).points() == [(0, 0), (1, 1)]


def test_concave_input_is_a_fixpoint():
    # values on the concave curve 2u - u^2 at the jump points
    steps = [(F(k, 8), 2 * F(k, 8) - F(k, 8) ** 2) for k in range(1, 8)]
    lam = concave_majorant(StepModulus.from_steps(steps))
    assert lam.points() == [(0, 0)] + steps + [(1, 1)]


def test_step_modulus_validation():
    with pytest.raises(InputError):
        StepModulus((F(0), F(1, 2)), (F(0), F(2)))
    with pytest.raises(InputError):
        StepModulus((F(1, 2),), (F(0),))
    with pytest.raises(InputError):
        StepModulus.from_steps([(0, F(1, 2))])
    with pytest.raises(InputError):
        StepModulus.from_steps([(F(1, 2), F(1, 2))])(-1)


def test_upper_hull_drops_collinear():
    assert upper_hull([(F(0), F(0)), (F(1, 2), F(1, 2)), (F(1), F(1))]) == [(0, 0), (1, 1)]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_majorant_properties(seed):
    rho = random_step_modulus(random.Random(seed))
    lam = concave_majorant(rho)
    assert lam.ys[0] == 0 and lam.ys[-1] == 1
    slopes = lam.slopes()
    assert all(a > b for a, b in zip(slopes, slopes[1:]))
    assert all(s >= 0 for s in slopes)
    for b, v in rho.graph_points():
        assert lam(b) >= v
    assert all(y > 0 for y in lam.ys[1:])
    # lam(u) / u nonincreasing: lam(a) <= (a / b) lam(b) for b < a
    pts = [p for p in lam.points() if p[0] > 0]
    for (b, lb), (a, la) in zip(pts, pts[1:]):
        assert la * b <= a * lb


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_majorant_matches_grid_oracle(seed):
    rho = random_step_modulus(random.Random(seed))
    lam = concave_majorant(rho)
    oracle = grid_sup_of_chords(rho)
    n = 2**GRID_BITS
    ours = np.array([float(lam(F(k, n))) for k in range(n + 1)])
    assert np.max(np.abs(ours - oracle)) <= 1e-9


class TestPLMap:
    def test_eval_and_inverses(self):
        f = PLMap.from_points([(0, 0), (F(1, 4), F(1, 2)), (1, 1)])
        assert f(F(1, 8)) == F(1, 4)
        assert f.upper_inverse(F(1, 2)) == F(1, 4)
        assert f.lower_inverse(F(1, 4)) == F(1, 8)
        flat = PLMap.from_points([(0, 0), (F(1, 4), F(1, 2)), (F(1, 2), F(1, 2)), (1, 1)])
        assert flat.upper_inverse(F(1, 2)) == F(1, 2)
        assert flat.lower_inverse(F(1, 2)) == F(1, 4)
        assert PLMap.from_points([(0, F(1, 2)), (1, 1)]).upper_inverse(F(1, 4)) is None

    def test_validation(self):
        with pytest.raises(InputError):
            PLMap.from_points([(0, 0), (F(1, 2), 1), (F(1, 2), 1), (1, 1)])
        with pytest.raises(InputError):
            PLMap.from_points([(0, F(1, 2)), (1, F(1, 4))])
        with pytest.raises(InputError):
            PLMap.from_points([(0, 0), (F(1, 2), 1)])
        with pytest.raises(InputError):
            PLMap.identity()(F(3, 2))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_compose_is_pointwise(self, seed):
        rng = random.Random(seed)

        def rand_pl():
            xs = sorted({F(rng.randint(1, 31), 32) for _ in range(rng.randint(0, 4))})
            ys = sorted(F(rng.randint(0, 32), 32) for _ in xs)
            return PLMap.from_points([(0, 0)] + list(zip(xs, ys)) + [(1, 1)])

        f, g = rand_pl(), rand_pl()
        h = f.compose(g)
        for k in range(129):
            u = F(k, 128)
            assert h(u) == f(g(u))

    def test_agrees_on(self):
        f = PLMap.from_points([(0, 0), (F(1, 4), F(1, 2)), (1, 1)])
        g = PLMap.from_points([(0, 0), (F(1, 8), F(1, 8)), (F(1, 4), F(1, 2)), (1, 1)])
        assert f.agrees_on(g, F(1, 4))
        assert not f.agrees_on(g, F(1, 16))
