"""Ends of locally finite simplicial trees given by finite presentations.

The input lists vertices and unit edges; vertices marked in ``rays`` carry an
infinite ray going off to infinity. Depths are edge counts from the root, so
a meet at depth ``n`` gives end distance ``exp(-n)``, kept as the integer ``n``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True)
class SimplicialTree:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    rays: tuple[str, ...]
    root: str

    def __post_init__(self):
        verts = set(self.vertices)
        if len(verts) != len(self.vertices):
            raise InputError("duplicate vertex")
        if self.root not in verts:
            raise InputError(f"root {self.root!r} is not a vertex")
        if len(set(self.rays)) != len(self.rays):
            raise InputError("a vertex may carry at most one ray")
        for v in self.rays:
            if v not in verts:
                raise InputError(f"ray marked on unknown vertex {v!r}")
        seen_edges = set()
        for a, b in self.edges:
            if a not in verts or b not in verts:
                raise InputError(f"edge ({a}, {b}) uses an unknown vertex")
            if a == b:
                raise InputError(f"loop at {a!r}: the input is not a tree")
            key = frozenset((a, b))
            if key in seen_edges:
                raise InputError(f"repeated edge ({a}, {b}): the input is not a tree")
            seen_edges.add(key)
        if len(self.edges) != len(self.vertices) - 1:
            raise InputError("edge count differs from vertices - 1: the input is cyclic or disconnected")
        if len(self.depths()) != len(self.vertices):
            raise InputError("the input graph is disconnected")

    def neighbours(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def depths(self) -> dict[str, int]:
        adj = self.neighbours()
        depth = {self.root: 0}
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in depth:
                    depth[w] = depth[v] + 1
                    queue.append(w)
        return depth

    def parents(self) -> dict[str, str | None]:
        adj = self.neighbours()
        parent: dict[str, str | None] = {self.root: None}
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in parent:
                    parent[w] = v
                    queue.append(w)
        return parent

    def rerooted(self, root: str) -> SimplicialTree:
        return SimplicialTree(self.vertices, self.edges, self.rays, root)


def simplicial_from_json(obj) -> SimplicialTree:
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise InputError("simplicial tree JSON needs 'vertices' and 'edges'")
    vertices = tuple(str(v) for v in obj["vertices"])
    if not vertices:
        raise InputError("a simplicial tree needs a vertex")
    edges = []
    for e in obj["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise InputError(f"edge must be a pair, got {e!r}")
        edges.append((str(e[0]), str(e[1])))
    rays = tuple(str(v) for v in obj.get("rays", []))
    root = str(obj["root"]) if obj.get("root") is not None else vertices[0]
    return SimplicialTree(vertices, tuple(edges), rays, root)


@dataclass(frozen=True)
class EndReport:
    root: str
    kept: tuple[str, ...]
    removed: tuple[str, ...]
    ends: tuple[str, ...]
    meet_depth: tuple[tuple[int | None, ...], ...]

    @property
    def end_count(self) -> int:
        return len(self.ends)

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "end_count": self.end_count,
            "compact": self.end_count == 0,
            "kept_vertices": list(self.kept),
            "pruned_vertices": list(self.removed),
            "ends": list(self.ends),
            "meet_depth": [list(r) for r in self.meet_depth],
            "distance": [[None if n is None else f"exp(-{n})" for n in r] for r in self.meet_depth],
        }


def freudenthal_ends(tree: SimplicialTree) -> EndReport:
    """Prune finite branches, then read off the ends and their meet depths."""
    parent = tree.parents()
    depth = tree.depths()
    marked = set(tree.rays)
    keep: set[str] = set()
    for v in marked:
        while v is not None and v not in keep:
            keep.add(v)
            v = parent[v]
    order = sorted(tree.vertices, key=lambda v: (depth[v], v))
    kept = tuple(v for v in order if v in keep)
    removed = tuple(v for v in order if v not in keep)
    ends = tuple(sorted(marked, key=lambda v: (depth[v], v)))

    def ancestors(v: str) -> list[str]:
        path = []
        while v is not None:
            path.append(v)
            v = parent[v]
        return path

    rows = []
    for a in ends:
        up = set(ancestors(a))
        row = []
        for b in ends:
            if a == b:
                row.append(None)
                continue
            w = b
            while w not in up:
                w = parent[w]
            row.append(depth[w])
        rows.append(tuple(row))
    return EndReport(tree.root, kept, removed, ends, tuple(rows))


def same_proper_type(a: SimplicialTree, b: SimplicialTree) -> bool:
    """Finite discrete end spaces are homeomorphic exactly when they have equally many points."""
    return freudenthal_ends(a).end_count == freudenthal_ends(b).end_count
