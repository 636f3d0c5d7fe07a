"""Finite presentations of rooted R-trees in level coordinates.

A point at depth ``t`` below the root is stored by its level ``u = e^{-t}``,
an exact rational in ``(0, 1]``; the root sits at level 1 and depth grows as
the level shrinks. A tree is a finite rooted graph of nodes labelled with
levels whose leaves are either RAY (the branch continues to infinite depth)
or TIP (the branch stops at the leaf's level).

Points are ``(carrier leaf, level)`` pairs. Two points ``(c1, u)`` and
``(c2, u)`` coincide exactly when the carriers have already merged at that
level, i.e. ``meet_level(c1, c2) <= u``. Distances are returned as the ratio
``q`` with ``d = ln q``; for ``x``, ``y`` with meet level ``m`` this is
``m**2 / (u_x * u_y)``.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import InputError, NotGeodesicallyCompleteError, TrivialTreeError
from .rational import as_level, format_rational

ZERO = Fraction(0)
ONE = Fraction(1)


class LeafKind(str, enum.Enum):
    RAY = "RAY"
    TIP = "TIP"


@dataclass(frozen=True)
class TreeNode:
    id: str
    level: Fraction
    children: tuple[str, ...] = ()


@dataclass(frozen=True, order=True)
class TreePoint:
    carrier: str
    level: Fraction

    def __str__(self) -> str:
        return f"({self.carrier}, {format_rational(self.level)})"


@total_ordering
@dataclass(frozen=True)
class TreeDistance:
    """Distance ``ln(q)`` stored exactly through ``q >= 1``."""

    q: Fraction

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"distance ratio must be >= 1, got {self.q}")

    def __float__(self) -> float:
        return math.log(self.q.numerator) - math.log(self.q.denominator)

    def __add__(self, other: TreeDistance) -> TreeDistance:
        return TreeDistance(self.q * other.q)

    def __lt__(self, other: TreeDistance) -> bool:
        return self.q < other.q

    @property
    def is_zero(self) -> bool:
        return self.q == 1


@dataclass(frozen=True)
class ApproxPoint:
    """Floating point position on a carrier, produced by arc interpolation."""

    carrier: str
    level: float
    tolerance: float = 1e-12

    def close_to(self, tree: TreePresentation, point: TreePoint) -> bool:
        return approx_distance(tree, self, point) <= self.tolerance


class TreePresentation:
    """Immutable finite rooted tree with level-labelled nodes."""

    def __init__(self, nodes: Iterable[TreeNode], leaves: Mapping[str, LeafKind | str]):
        table: dict[str, TreeNode] = {}
        for node in nodes:
            if node.id in table:
                raise InputError(f"duplicate node id {node.id!r}")
            table[node.id] = TreeNode(str(node.id), as_level(node.level), tuple(node.children))
        if not table:
            raise InputError("a tree needs at least a root node")
        parent: dict[str, str] = {}
        for node in table.values():
            for child in node.children:
                if child not in table:
                    raise InputError(f"node {node.id!r} lists unknown child {child!r}")
                if child in parent:
                    raise InputError(f"node {child!r} has two parents")
                parent[child] = node.id
        roots = [nid for nid in table if nid not in parent]
        if len(roots) != 1:
            raise InputError(f"expected exactly one root, found {len(roots)}")
        root = roots[0]
        if table[root].level != 1:
            raise InputError("the root must have level 1")

        order: list[str] = []
        stack = [root]
        while stack:
            nid = stack.pop()
            order.append(nid)
            node = table[nid]
            for child in node.children:
                if table[child].level >= node.level:
                    raise InputError(
                        f"child {child!r} must lie strictly below {nid!r} "
                        f"(level {format_rational(table[child].level)} >= "
                        f"{format_rational(node.level)})"
                    )
            stack.extend(reversed(node.children))
        if len(order) != len(table):
            raise InputError("some nodes are unreachable from the root")

        kinds: dict[str, LeafKind] = {}
        for lid, kind in leaves.items():
            lid = str(lid)
            if lid not in table:
                raise InputError(f"leaf tag for unknown node {lid!r}")
            if table[lid].children or lid == root:
                raise InputError(f"node {lid!r} is tagged as a leaf but is not one")
            try:
                kinds[lid] = LeafKind(kind)
            except ValueError:
                raise InputError(f"leaf kind must be RAY or TIP, got {kind!r}") from None
        for nid in order:
            if nid != root and not table[nid].children and nid not in kinds:
                raise InputError(f"leaf {nid!r} is not tagged RAY or TIP")

        self._nodes = table
        self._parent = parent
        self._root = root
        self._order = tuple(order)
        self._leaves = tuple(nid for nid in order if nid in kinds)
        self._kinds = kinds
        self._meet: dict[str, dict[str, Fraction]] | None = None
        self._leaf_rank = {lid: k for k, lid in enumerate(self._leaves)}

    # structure ----------------------------------------------------------

    @property
    def root(self) -> str:
        return self._root

    @property
    def nodes(self) -> Mapping[str, TreeNode]:
        return self._nodes

    def node_ids(self) -> tuple[str, ...]:
        """Node ids in depth-first preorder."""
        return self._order

    @property
    def leaves(self) -> tuple[str, ...]:
        return self._leaves

    @property
    def rays(self) -> tuple[str, ...]:
        return tuple(lid for lid in self._leaves if self._kinds[lid] is LeafKind.RAY)

    @property
    def tips(self) -> tuple[str, ...]:
        return tuple(lid for lid in self._leaves if self._kinds[lid] is LeafKind.TIP)

    def kind(self, leaf: str) -> LeafKind:
        try:
            return self._kinds[leaf]
        except KeyError:
            raise InputError(f"unknown leaf {leaf!r}") from None

    def level(self, nid: str) -> Fraction:
        return self._nodes[nid].level

    def parent(self, nid: str) -> str | None:
        return self._parent.get(nid)

    def children(self, nid: str) -> tuple[str, ...]:
        return self._nodes[nid].children

    @property
    def is_trivial(self) -> bool:
        return not self._leaves

    def leaves_below(self, nid: str) -> list[str]:
        out = []
        stack = [nid]
        while stack:
            cur = stack.pop()
            if cur in self._kinds:
                out.append(cur)
            stack.extend(reversed(self._nodes[cur].children))
        return out

    # meets ----------------------------------------------------------------

    def _meet_table(self) -> dict[str, dict[str, Fraction]]:
        if self._meet is None:
            table: dict[str, dict[str, Fraction]] = {lid: {} for lid in self._leaves}
            below: dict[str, list[str]] = {}
            for nid in reversed(self._order):
                node = self._nodes[nid]
                if not node.children:
                    below[nid] = [nid] if nid in self._kinds else []
                    continue
                groups = [below.pop(c) for c in node.children]
                for i, gi in enumerate(groups):
                    for gj in groups[i + 1 :]:
                        for a in gi:
                            row = table[a]
                            for b in gj:
                                row[b] = node.level
                                table[b][a] = node.level
                below[nid] = [lid for g in groups for lid in g]
            self._meet = table
        return self._meet

    def carrier_meet(self, a: str, b: str) -> Fraction:
        """Level of the last common point of two carriers (0 if identical)."""
        if a == b:
            if a not in self._kinds:
                raise InputError(f"unknown carrier {a!r}")
            return ZERO
        try:
            return self._meet_table()[a][b]
        except KeyError:
            raise InputError(f"unknown carrier in ({a!r}, {b!r})") from None

    # points -----------------------------------------------------------------

    def floor(self, leaf: str) -> Fraction:
        """Lowest level reachable on a carrier: 0 for rays, the tip level for tips."""
        return ZERO if self.kind(leaf) is LeafKind.RAY else self._nodes[leaf].level

    def point(self, carrier: str, level) -> TreePoint:
        x = TreePoint(str(carrier), as_level(level))
        self.check_point(x)
        return x

    def root_point(self) -> TreePoint:
        if self.is_trivial:
            raise TrivialTreeError("the trivial tree has no carriers")
        return TreePoint(self._leaves[0], ONE)

    def check_point(self, x: TreePoint) -> None:
        floor = self.floor(x.carrier)
        if not (0 < x.level <= 1) or x.level < floor:
            raise InputError(f"point {x} is not on carrier {x.carrier!r}")

    def carriers_through(self, x: TreePoint) -> list[str]:
        self.check_point(x)
        return [
            lid
            for lid in self._leaves
            if self.floor(lid) <= x.level and self.carrier_meet(x.carrier, lid) <= x.level
        ]

    def normalize(self, x: TreePoint) -> TreePoint:
        """Representative with the first carrier (in preorder) through ``x``."""
        return TreePoint(self.carriers_through(x)[0], x.level)

    def same_point(self, x: TreePoint, y: TreePoint) -> bool:
        return x.level == y.level and self.carrier_meet(x.carrier, y.carrier) <= x.level

    def __eq__(self, other) -> bool:
        if not isinstance(other, TreePresentation):
            return NotImplemented
        return self._nodes == other._nodes and self._kinds == other._kinds

    def __hash__(self) -> int:
        return hash((self._root, len(self._nodes), self._leaves))

    def __repr__(self) -> str:
        return (
            f"TreePresentation({len(self._nodes)} nodes, {len(self.rays)} rays, "
            f"{len(self.tips)} tips)"
        )


def norm(tree: TreePresentation, x: TreePoint) -> TreeDistance:
    tree.check_point(x)
    return TreeDistance(1 / x.level)


def meet(tree: TreePresentation, x: TreePoint, y: TreePoint) -> TreePoint:
    """Deepest common point of the arcs from the root to ``x`` and ``y``."""
    tree.check_point(x)
    tree.check_point(y)
    level = max(tree.carrier_meet(x.carrier, y.carrier), x.level, y.level)
    return TreePoint(x.carrier, level)


def distance(tree: TreePresentation, x: TreePoint, y: TreePoint) -> TreeDistance:
    m = meet(tree, x, y).level
    return TreeDistance(m * m / (x.level * y.level))


def _log(u: Fraction | float) -> float:
    if isinstance(u, Fraction):
        return math.log(u.numerator) - math.log(u.denominator)
    return math.log(u)


def approx_distance(tree: TreePresentation, p, q) -> float:
    """Float distance between exact or approximate points."""
    cm = tree.carrier_meet(p.carrier, q.carrier)
    lp, lq = _log(p.level), _log(q.level)
    lm = max(_log(cm) if cm > 0 else -math.inf, lp, lq)
    return 2 * lm - lp - lq


def geodesic_point(tree: TreePresentation, x: TreePoint, y: TreePoint, s) -> ApproxPoint:
    """Point at arclength ``s * d(x, y)`` on the arc from ``x`` to ``y``.

    The arc climbs from ``x`` to ``meet(x, y)`` and then descends to ``y``.
    """
    s = float(s)
    if not 0 <= s <= 1:
        raise InputError("arc parameter must lie in [0, 1]")
    m = meet(tree, x, y).level
    if s == 0:
        return ApproxPoint(x.carrier, float(x.level))
    if s == 1:
        return ApproxPoint(y.carrier, float(y.level))
    lx, ly, lm = _log(x.level), _log(y.level), _log(m)
    up, down = lm - lx, lm - ly
    travelled = s * (up + down)
    if travelled <= up:
        return ApproxPoint(x.carrier, math.exp(lx + travelled))
    return ApproxPoint(y.carrier, math.exp(lm - (travelled - up)))


# cut sets ---------------------------------------------------------------


def _cut_level(level) -> Fraction:
    u = as_level(level)
    if u >= 1:
        raise InputError("cut level must be < 1 (positive depth)")
    return u


def components_beyond(tree: TreePresentation, level) -> dict[TreePoint, frozenset[str]]:
    """Cut the tree at ``level``; map each cut point to the carriers of its subtree.

    A branch node sitting exactly at the cut level belongs to the component it
    roots, so carriers meeting at that node share one cut point.
    """
    u = _cut_level(level)
    groups: list[list[str]] = []
    for lid in tree.leaves:
        if tree.floor(lid) > u:
            continue
        for group in groups:
            if tree.carrier_meet(group[0], lid) <= u:
                group.append(lid)
                break
        else:
            groups.append([lid])
    return {TreePoint(g[0], u): frozenset(g) for g in groups}


def cut_set(tree: TreePresentation, level) -> list[TreePoint]:
    return list(components_beyond(tree, level))


def component_of(components: Mapping[TreePoint, frozenset[str]], carrier: str) -> TreePoint:
    for point, carriers in components.items():
        if carrier in carriers:
            return point
    raise InputError(f"carrier {carrier!r} does not cross the cut")


# completeness and pruning ------------------------------------------------


def is_geodesically_complete(tree: TreePresentation) -> bool:
    """Every leaf is a ray; the one-node tree counts as incomplete here."""
    return bool(tree.leaves) and not tree.tips


def require_complete(tree: TreePresentation) -> None:
    if tree.is_trivial:
        raise TrivialTreeError("the trivial tree has an empty end space")
    if tree.tips:
        raise NotGeodesicallyCompleteError(f"tree has TIP leaves: {', '.join(tree.tips)}")


def prune(tree: TreePresentation) -> TreePresentation:
    """Maximal geodesically complete subtree: drop everything without a ray below it."""
    keep: set[str] = set()
    for nid in reversed(tree.node_ids()):
        node = tree.nodes[nid]
        if nid in tree.leaves:
            if tree.kind(nid) is LeafKind.RAY:
                keep.add(nid)
        elif any(c in keep for c in node.children):
            keep.add(nid)
    if tree.root not in keep:
        raise TrivialTreeError("no RAY leaf survives pruning; the result is the trivial tree")
    nodes = [
        TreeNode(nid, tree.level(nid), tuple(c for c in tree.children(nid) if c in keep))
        for nid in tree.node_ids()
        if nid in keep
    ]
    return TreePresentation(nodes, {lid: LeafKind.RAY for lid in tree.rays})


# canonical forms ------------------------------------------------------------


def _encodings(tree: TreePresentation, children: Mapping[str, list[str]]) -> dict[str, tuple]:
    enc: dict[str, tuple] = {}
    for nid in reversed(tree.node_ids()):
        if nid not in children:
            continue
        kids = children[nid]
        if not kids:
            if nid in tree.leaves and tree.kind(nid) is LeafKind.RAY:
                enc[nid] = (0,)
            else:
                enc[nid] = (1, tree.level(nid))
        else:
            enc[nid] = (2, tree.level(nid), tuple(sorted(enc[c] for c in kids)))
    return enc


def _suppressed_children(tree: TreePresentation) -> dict[str, list[str]]:
    """Child lists after skipping non-root nodes with exactly one child."""
    out: dict[str, list[str]] = {}

    def skip(nid: str) -> str:
        while len(tree.children(nid)) == 1:
            nid = tree.children(nid)[0]
        return nid

    stack = [tree.root]
    while stack:
        nid = stack.pop()
        kids = [skip(c) for c in tree.children(nid)]
        out[nid] = kids
        stack.extend(kids)
    return out


def canonical_encoding(tree: TreePresentation) -> tuple:
    """Isomorphism invariant of the suppressed tree (RAY leaf levels ignored)."""
    children = _suppressed_children(tree)
    return _encodings(tree, children)[tree.root]


def canonicalize(tree: TreePresentation) -> TreePresentation:
    """Suppress unary internal nodes and sort children by canonical encoding."""
    if tree.is_trivial:
        raise TrivialTreeError("cannot canonicalize the trivial tree")
    children = _suppressed_children(tree)
    enc = _encodings(tree, children)
    nodes = []
    for nid in tree.node_ids():
        if nid not in children:
            continue
        kids = sorted(children[nid], key=lambda c: (enc[c], tree.leaves_below(c)))
        nodes.append(TreeNode(nid, tree.level(nid), tuple(kids)))
    kinds = {lid: tree.kind(lid) for lid in tree.leaves}
    return TreePresentation(nodes, kinds)


def rooted_isometric(tree: TreePresentation, other: TreePresentation) -> dict[str, str] | None:
    """Ray correspondence preserving every meet level, or None if none exists."""
    require_complete(tree)
    require_complete(other)
    a, b = canonicalize(tree), canonicalize(other)
    enc_a = _encodings(a, {n: list(a.children(n)) for n in a.node_ids()})
    enc_b = _encodings(b, {n: list(b.children(n)) for n in b.node_ids()})
    if enc_a[a.root] != enc_b[b.root]:
        return None
    corr: dict[str, str] = {}
    stack = [(a.root, b.root)]
    while stack:
        x, y = stack.pop()
        kx, ky = a.children(x), b.children(y)
        if not kx:
            corr[x] = y
            continue
        stack.extend(zip(kx, ky))
    return corr


def verify_correspondence(
    tree: TreePresentation, other: TreePresentation, corr: Mapping[str, str]
) -> bool:
    """Direct check that ``corr`` is a ray bijection preserving meet levels."""
    rays_a, rays_b = tree.rays, other.rays
    if sorted(corr) != sorted(rays_a) or sorted(corr.values()) != sorted(rays_b):
        return False
    for i, x in enumerate(rays_a):
        for y in rays_a[i + 1 :]:
            if tree.carrier_meet(x, y) != other.carrier_meet(corr[x], corr[y]):
                return False
    return True

