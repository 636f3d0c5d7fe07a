"""Seeded random objects for property tests and the acceptance suite."""

from __future__ import annotations

import random
from fractions import Fraction

from .endmaps import EndMap
from .modulus import StepModulus
from .rtree import LeafKind, TreeNode, TreePresentation
from .ultrametric import FiniteUltrametricSpace

ONE = Fraction(1)


def _distinct_levels(rng: random.Random, count: int, max_den: int, top: Fraction = ONE) -> list[Fraction]:
    """``count`` distinct rationals in (0, top] with denominators <= ``max_den``, ascending."""
    out: set[Fraction] = set()
    while len(out) < count:
        den = rng.randint(2, max_den)
        num = rng.randint(1, den)
        v = Fraction(num, den) * top
        if v.denominator <= max_den and 0 < v <= top:
            out.add(v)
    return sorted(out)


def random_space(rng: random.Random, n: int, max_den: int = 2**16) -> FiniteUltrametricSpace:
    """Random ultrametric on ``n`` points from a random agglomerative merge order."""
    labels = [f"p{k}" for k in range(n)]
    clusters = [[k] for k in range(n)]
    levels = _distinct_levels(rng, max(n - 1, 1), max_den)
    if rng.random() < 0.5:
        levels[-1] = ONE
    rows = [[Fraction(0)] * n for _ in range(n)]
    step = 0
    while len(clusters) > 1:
        level = levels[step]
        step += 1
        k = min(len(clusters), rng.choice((2, 2, 2, 3, 4)))
        if step == len(levels):
            k = len(clusters)
        picked = rng.sample(range(len(clusters)), k)
        groups = [clusters[i] for i in picked]
        for i, ga in enumerate(groups):
            for gb in groups[i + 1 :]:
                for a in ga:
                    for b in gb:
                        rows[a][b] = rows[b][a] = level
        merged = [x for g in groups for x in g]
        clusters = [c for i, c in enumerate(clusters) if i not in picked] + [merged]
    return FiniteUltrametricSpace(labels, rows)


def random_tree(
    rng: random.Random,
    max_ends: int = 64,
    max_levels: int = 8,
    min_root_children: int = 1,
    max_den: int = 64,
    unary_rate: float = 0.15,
) -> TreePresentation:
    """Random geodesically complete presentation, with the occasional unary node."""
    nodes: list[TreeNode] = []
    counter = 0

    def fresh(prefix: str) -> str:
        nonlocal counter
        counter += 1
        return f"{prefix}{counter}"

    def below(level: Fraction) -> Fraction:
        return level * Fraction(rng.randint(1, max_den - 1), max_den)

    def grow(nid: str, level: Fraction, depth: int, budget: int, forced: int = 0) -> None:
        if depth >= max_levels or budget <= 1 or (not forced and rng.random() < 0.3):
            if depth == 0:
                # the root cannot itself be a ray leaf
                ray = fresh("r")
                nodes.append(TreeNode(nid, level, (ray,)))
                nodes.append(TreeNode(ray, below(level)))
                leaves[ray] = LeafKind.RAY
            else:
                nodes.append(TreeNode(nid, level))
                leaves[nid] = LeafKind.RAY
            return
        if not forced and rng.random() < unary_rate:
            kid = fresh("u")
            nodes.append(TreeNode(nid, level, (kid,)))
            grow(kid, below(level), depth + 1, budget)
            return
        k = max(forced, rng.randint(2, 4))
        k = min(k, budget)
        shares = [budget // k] * k
        kids = [fresh("n") for _ in range(k)]
        nodes.append(TreeNode(nid, level, tuple(kids)))
        for kid, share in zip(kids, shares):
            grow(kid, below(level), depth + 1, max(1, share))

    leaves: dict[str, LeafKind] = {}
    grow("root", ONE, 0, max_ends, forced=min_root_children if min_root_children > 1 else 0)
    return TreePresentation(nodes, leaves)


def random_endmap(
    rng: random.Random, source: FiniteUltrametricSpace, target: FiniteUltrametricSpace
) -> EndMap:
    return EndMap(source, target, {x: rng.choice(target.labels) for x in source.labels})


def random_step_modulus(rng: random.Random, grid_bits: int = 10, max_steps: int = 8) -> StepModulus:
    """Random modulus whose breakpoints lie on the dyadic grid of ``2**grid_bits`` cells."""
    cells = 2**grid_bits
    k = rng.randint(1, max_steps)
    bps = sorted(rng.sample(range(1, cells + 1), k))
    vals = sorted(rng.randint(1, cells) for _ in range(k))
    return StepModulus.from_steps((Fraction(b, cells), Fraction(v, cells)) for b, v in zip(bps, vals))


def relabelled_copy(tree: TreePresentation, rng: random.Random) -> tuple[TreePresentation, dict[str, str]]:
    """Same tree with shuffled children and fresh ids; returns the ray relabelling too."""
    ids = list(tree.node_ids())
    names = [f"v{k}" for k in range(len(ids))]
    rng.shuffle(names)
    rename = dict(zip(ids, names))
    nodes = []
    for nid in ids:
        kids = [rename[c] for c in tree.children(nid)]
        rng.shuffle(kids)
        nodes.append(TreeNode(rename[nid], tree.level(nid), tuple(kids)))
    rng.shuffle(nodes)
    leaves = {rename[l]: tree.kind(l) for l in tree.leaves}
    return TreePresentation(nodes, leaves), {r: rename[r] for r in tree.rays}


def perturb_one_level(tree: TreePresentation, rng: random.Random) -> TreePresentation | None:
    """Raise the level of one non-root branch node halfway to its parent.

    The multiset of branch levels changes, so the result is never rooted
    isometric to the input. None when the tree has no such node.
    """
    branch = [n for n in tree.node_ids() if n != tree.root and len(tree.children(n)) >= 2]
    if not branch:
        return None
    nid = rng.choice(branch)
    new = (tree.level(nid) + tree.level(tree.parent(nid))) / 2
    nodes = [
        TreeNode(n, new if n == nid else tree.level(n), tree.children(n)) for n in tree.node_ids()
    ]
    return TreePresentation(nodes, {l: tree.kind(l) for l in tree.leaves})
