"""End-to-end acceptance checks at full size.

Each test prints one ``PASS``/``FAIL`` line; run with ``-s`` to see them
alongside pytest's own summary.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import make_s3, make_s3_prime
from test_modulus import GRID_BITS, grid_sup_of_chords
from ultratree.duality import ends_of, tree_of
from ultratree.endmaps import EndMap
from ultratree.generators import (
    perturb_one_level,
    random_endmap,
    random_space,
    random_step_modulus,
    random_tree,
    relabelled_copy,
)
from ultratree.homotopy import (
    ENDPOINT_TOL,
    deep_level,
    endpoint_error,
    homotopy_bound_check,
    path_stays_in_component,
)
from ultratree.modulus import concave_majorant, modulus_of
from ultratree.morphisms import (
    RadialTreeMap,
    check_lipschitz1_sampled,
    component_maps_agree,
    compose,
    eval_tree_map,
    induce_end_map,
    induce_tree_map,
    maps_equivalent,
    properness_counterexample,
    random_compatible_reparams,
    separating_level,
    star_family_map,
)
from ultratree.nonrooted import nonrooted_end_map
from ultratree.rtree import TreePoint, canonicalize, cut_set, rooted_isometric, verify_correspondence


@pytest.fixture
def criterion(capsys):
    """Context manager printing one result line for a numbered criterion."""

    @contextmanager
    def run(number: int, title: str):
        info: dict = {}
        start = time.perf_counter()
        try:
            yield info
        except BaseException:
            with capsys.disabled():
                print(f"\n[FAIL] {number:>2}. {title}")
            raise
        elapsed = time.perf_counter() - start
        detail = ", ".join(f"{k}={v}" for k, v in info.items())
        with capsys.disabled():
            print(f"\n[PASS] {number:>2}. {title} ({elapsed:.2f}s{'; ' + detail if detail else ''})")

    return run


def random_induced(rng: random.Random, max_points: int = 12) -> EndMap:
    src = random_space(rng, rng.randint(2, max_points), max_den=256)
    tgt = random_space(rng, rng.randint(2, max_points), max_den=256)
    return random_endmap(rng, src, tgt)


def differing_reparams(m: RadialTreeMap, rng: random.Random) -> dict:
    for _ in range(50):
        reparam = random_compatible_reparams(m, rng)
        if any(reparam[f].points() != m.reparam[f].points() for f in m.source.rays):
            return reparam
    raise AssertionError("could not draw a different compatible reparametrisation")


def test_01_ultrametric_roundtrip(criterion):
    with criterion(1, "ultrametric -> tree -> ends is exact on 200 spaces") as info:
        rng = random.Random(101)
        spaces = [random_space(rng, rng.randint(1, 64), max_den=2**16) for _ in range(200)]
        start = time.perf_counter()
        for space in spaces:
            back = ends_of(tree_of(space)).space
            assert back.labels == space.labels
            assert back.matrix() == space.matrix()
        elapsed = time.perf_counter() - start
        info["roundtrip_s"] = f"{elapsed:.2f}"
        assert elapsed < 5.0


def test_02_tree_roundtrip(criterion):
    with criterion(2, "tree -> ends -> tree is rooted isometric on 200 trees") as info:
        rng = random.Random(202)
        trees = [random_tree(rng, max_ends=64, max_levels=8) for _ in range(200)]
        start = time.perf_counter()
        for tree in trees:
            a = canonicalize(tree)
            b = canonicalize(tree_of(ends_of(tree).space))
            corr = rooted_isometric(a, b)
            assert corr is not None and verify_correspondence(a, b, corr)
        elapsed = time.perf_counter() - start
        info["roundtrip_s"] = f"{elapsed:.2f}"
        info["max_ends"] = max(len(t.rays) for t in trees)
        assert elapsed < 5.0


def test_03_majorant(criterion):
    with criterion(3, "concave majorant: dominance, strict slopes, grid oracle, fixture"):
        rng = random.Random(303)
        n = 2**GRID_BITS
        grid = [F(k, n) for k in range(n + 1)]
        for _ in range(50):
            rho = random_step_modulus(rng, grid_bits=GRID_BITS)
            lam = concave_majorant(rho)
            for b, v in rho.graph_points():
                assert lam(b) >= v
            slopes = lam.slopes()
            assert all(s > t for s, t in zip(slopes, slopes[1:]))
            ours = np.array([float(lam(u)) for u in grid])
            assert np.max(np.abs(ours - grid_sup_of_chords(rho))) <= 1e-9
        s3 = make_s3()
        fixture = EndMap(s3, make_s3_prime(), {"a": "a", "b": "b", "c": "c"})
        lam = concave_majorant(modulus_of(fixture))
        for u in [F(k, 240) for k in range(241)]:
            expected = 2 * u if u <= F(1, 4) else F(1, 2) + F(2, 3) * (u - F(1, 4))
            assert lam(u) == expected


def test_04_lipschitz(criterion):
    with criterion(4, "induced maps are 1-Lipschitz on 50 end maps") as info:
        rng = random.Random(404)
        fs = [random_induced(rng) for _ in range(50)]
        start = time.perf_counter()
        checked = 0
        for f in fs:
            report = check_lipschitz1_sampled(induce_tree_map(f), 10_000, rng, exhaustive=True)
            assert report.ok, report.summary
            checked += report.data["pairs"]
        elapsed = time.perf_counter() - start
        info["pairs"] = checked
        info["check_s"] = f"{elapsed:.2f}"
        assert elapsed < 10.0


def test_05_functor(criterion):
    with criterion(5, "end map recovery on 50 maps and composition law on 30 pairs"):
        rng = random.Random(505)
        for _ in range(50):
            f = random_induced(rng)
            assert induce_end_map(induce_tree_map(f)) == f
        for _ in range(30):
            f = random_induced(rng)
            g = random_endmap(rng, f.target, random_space(rng, rng.randint(1, 12), max_den=256))
            composed = compose(induce_tree_map(f), induce_tree_map(g))
            assert induce_end_map(composed) == f.then(g)


def test_06_equivalence(criterion):
    with criterion(6, "equivalence matches end-map equality and component maps"):
        rng = random.Random(606)
        for _ in range(30):
            m = induce_tree_map(random_induced(rng))
            other = RadialTreeMap(m.source, m.target, m.sigma, differing_reparams(m, rng))
            assert maps_equivalent(m, other)
            assert component_maps_agree(m, other)
        for _ in range(30):
            f = random_induced(rng)
            leaf = rng.choice(f.source.labels)
            moved = rng.choice([y for y in f.target.labels if y != f(leaf)])
            g = EndMap(f.source, f.target, {**f.assignment, leaf: moved})
            m, other = induce_tree_map(f), induce_tree_map(g)
            assert not maps_equivalent(m, other)
            assert not component_maps_agree(m, other)


def test_07_homotopy(criterion):
    with criterion(7, "homotopy endpoints, distance bound and component membership") as info:
        rng = random.Random(707)
        samples = 0
        worst = 0.0
        for _ in range(20):
            m = induce_tree_map(random_induced(rng))
            other = RadialTreeMap(m.source, m.target, m.sigma, differing_reparams(m, rng))
            rays = m.source.rays
            for _ in range(50):
                x = TreePoint(rng.choice(rays), F(rng.randint(1, 4096), 4096))
                y = TreePoint(rng.choice(rays), F(rng.randint(1, 4096), 4096))
                worst = max(worst, endpoint_error(m, other, x), endpoint_error(m, other, y))
                assert homotopy_bound_check(m, other, x, y, [rng.random()]).ok
                samples += 1
            level = separating_level(m.target)
            deep = deep_level(m, other, level)
            ts = [k / 16 for k in range(17)]
            for f in rays:
                assert path_stays_in_component(m, other, TreePoint(f, deep * F(rng.randint(1, 16), 16)), level, ts)
        assert worst <= ENDPOINT_TOL
        info["samples"] = samples
        info["worst_endpoint_error"] = f"{worst:.1e}"


def test_08_properness_family(criterion):
    with criterion(8, "star family witnesses grow with n") as info:
        d1, d0, d0p = F(1, 4), F(1, 2), F(3, 4)
        sizes = []
        for n in [2**k for k in range(1, 9)]:
            report = properness_counterexample(n, d1, d0, d0p)
            assert report.ok
            size = report.data["witness_cardinality"]
            assert size >= n
            # independent check: the witness is a cut set inside the preimage
            m = induce_tree_map(star_family_map(n, d1, d0, d0p))
            witness = cut_set(m.source, report.data["cut_level"])
            assert len(witness) == size
            for ray in m.source.rays:
                hits = [p for p in witness if m.source.carrier_meet(p.carrier, ray) <= p.level]
                assert len(hits) == 1
            assert all(eval_tree_map(m, p).level >= d1 for p in witness)
            sizes.append(size)
        assert all(a < b for a, b in zip(sizes, sizes[1:]))
        info["sizes"] = sizes


def test_09_isometry(criterion):
    with criterion(9, "relabelled copies accepted, perturbed trees rejected") as info:
        rng = random.Random(909)
        perturbed = skipped = 0
        while perturbed < 100:
            tree = random_tree(rng)
            bent = perturb_one_level(tree, rng)
            if bent is None:
                # only the root branches, so no level can move
                skipped += 1
                continue
            copy, _ = relabelled_copy(tree, rng)
            corr = rooted_isometric(tree, copy)
            assert corr is not None and verify_correspondence(tree, copy, corr)
            assert rooted_isometric(tree, bent) is None
            assert rooted_isometric(copy, bent) is None
            perturbed += 1
        info["skipped_root_only"] = skipped
        info["perturbed"] = perturbed


def test_10_nonrooted(criterion):
    with criterion(10, "re-rooted identity stays within [u_p, 1/u_p]; violation caught"):
        rng = random.Random(1010)
        for _ in range(30):
            tree = random_tree(rng, max_ends=32, min_root_children=2)
            p = TreePoint(rng.choice(tree.rays), F(rng.randint(1, 256), 256))
            _, _, report = nonrooted_end_map(tree, {r: r for r in tree.rays}, p)
            assert report.ok
            assert report.data["factor_low"] == tree.normalize(p).level
            assert report.data["factor_high"] == 1 / tree.normalize(p).level
        s3_tree = tree_of(make_s3())
        _, _, report = nonrooted_end_map(s3_tree, {"a": "b", "b": "a", "c": "c"}, TreePoint("b", F(1, 2)))
        assert not report.ok and report.data["violations"]

