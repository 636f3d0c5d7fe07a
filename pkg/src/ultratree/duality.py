"""Passing between trees and their end spaces.

``ends_of`` reads the ultrametric of rays off a geodesically complete tree:
two rays are at distance equal to the level where they part. ``tree_of``
builds the dendrogram of a finite ultrametric space in level coordinates,
one branch node per merge, with the root pinned at level 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rtree import (
    LeafKind,
    TreeNode,
    TreePresentation,
    canonicalize,
    require_complete,
    rooted_isometric,
)
from .ultrametric import FiniteUltrametricSpace


@dataclass(frozen=True)
class EndSpaceView:
    space: FiniteUltrametricSpace
    leaf_of: dict[str, str]  # point label -> RAY leaf id (identity labelling)


def ends_of(tree: TreePresentation) -> EndSpaceView:
    require_complete(tree)
    rays = tree.rays
    rows = [[tree.carrier_meet(a, b) for b in rays] for a in rays]
    space = FiniteUltrametricSpace(rays, rows)
    return EndSpaceView(space, {r: r for r in rays})


def _fresh_ids(taken: set[str]):
    k = 0
    while True:
        name = f"n{k}"
        k += 1
        if name not in taken:
            taken.add(name)
            yield name


def tree_of(space: FiniteUltrametricSpace) -> TreePresentation:
    """Dendrogram of ``space``; RAY leaves carry the point labels."""
    labels = space.labels
    n = len(labels)
    taken = set(labels)
    root_id = "root" if "root" not in taken else None
    if root_id:
        taken.add(root_id)
    fresh = _fresh_ids(taken)

    distinct, ranks = space.rank_matrix()
    values = distinct[1:]  # distinct[0] is the zero distance
    by_rank: list[list[tuple[int, int]]] = [[] for _ in values]
    iu, ju = np.triu_indices(n, k=1)
    flat = ranks[iu, ju]
    order = np.argsort(flat, kind="stable")
    for k in order.tolist():
        by_rank[int(flat[k]) - 1].append((int(iu[k]), int(ju[k])))

    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    # current top node of each union-find class, plus min label for ordering
    top: dict[int, str] = {i: labels[i] for i in range(n)}
    nodes: dict[str, tuple[Fraction, list[str]]] = {}
    for value, pairs in zip(values, by_rank):
        merging: dict[int, set[int]] = {}
        for i, j in pairs:
            ri, rj = find(i), find(j)
            if ri != rj:
                merging.setdefault(ri, set()).add(rj)
                merging.setdefault(rj, set()).add(ri)
        seen: set[int] = set()
        for start in sorted(merging):
            if start in seen:
                continue
            comp, stack = [], [start]
            seen.add(start)
            while stack:
                cur = stack.pop()
                comp.append(cur)
                for nxt in merging[cur]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            comp.sort()
            kids = [top.pop(c) for c in comp]
            new = comp[0]
            for c in comp[1:]:
                parent[c] = new
            nid = next(fresh)
            nodes[nid] = (value, kids)
            top[new] = nid

    (summit,) = top.values()
    if summit in nodes and nodes[summit][0] == 1:
        root = summit
    else:
        root = root_id or next(fresh)
        nodes[root] = (Fraction(1), [summit])

    out = []
    for nid, (level, kids) in nodes.items():
        out.append(TreeNode(nid, level, tuple(kids)))
        for kid in kids:
            if kid not in nodes:
                out.append(TreeNode(kid, level / 2))
    return TreePresentation(out, {lab: LeafKind.RAY for lab in labels})


@dataclass(frozen=True)
class RoundTripReport:
    ok: bool
    mismatch: tuple | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "mismatch": None if self.mismatch is None else [str(m) for m in self.mismatch]}


def roundtrip_ultrametric_check(space: FiniteUltrametricSpace) -> RoundTripReport:
    back = ends_of(tree_of(space)).space
    mismatch = space.first_mismatch(back)
    return RoundTripReport(mismatch is None, mismatch)


def roundtrip_tree_check(tree: TreePresentation) -> RoundTripReport:
    back = tree_of(ends_of(tree).space)
    corr = rooted_isometric(canonicalize(tree), canonicalize(back))
    if corr is None:
        return RoundTripReport(False, ("canonical encodings differ",))
    return RoundTripReport(True)
