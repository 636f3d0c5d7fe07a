"""Radial tree maps and the passage between end maps and tree maps.

A radial map sends the point ``(F, u)`` of the source tree to
``(sigma(F), r_F(u))``: ``sigma`` says where each ray goes and ``r_F`` is a
nondecreasing PL reparametrisation of levels. The map induced by an end map
``f`` uses ``sigma = f`` and the same concave majorant ``lam`` on every ray.

Properness, equivalence of maps and the component maps between cut sets are
all decided exactly on this representation.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .duality import ends_of, tree_of
from .endmaps import EndMap
from .errors import InputError, PropernessError, WellDefinednessError
from .modulus import PLMap, concave_majorant, modulus_of
from .reports import CheckReport
from .rtree import (
    TreeDistance,
    TreePoint,
    TreePresentation,
    component_of,
    components_beyond,
    cut_set,
    require_complete,
)
from .ultrametric import FiniteUltrametricSpace

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True, eq=False)
class RadialTreeMap:
    source: TreePresentation
    target: TreePresentation
    sigma: Mapping[str, str]
    reparam: Mapping[str, PLMap]
    check: bool = True

    def __post_init__(self):
        require_complete(self.source)
        require_complete(self.target)
        sigma, reparam = dict(self.sigma), dict(self.reparam)
        rays, targets = set(self.source.rays), set(self.target.rays)
        if set(sigma) != rays:
            raise InputError("sigma must assign every source ray exactly once")
        if not set(sigma.values()) <= targets:
            raise InputError("sigma must land on target rays")
        if set(reparam) != rays:
            raise InputError("every source ray needs a reparametrisation")
        for leaf, r in reparam.items():
            if r.ys[-1] != 1:
                raise InputError(f"reparametrisation of {leaf!r} must fix level 1 (rootedness)")
            if r.ys[0] == 0 and r.ys[1] == 0:
                raise InputError(f"reparametrisation of {leaf!r} reaches level 0 at positive level")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "reparam", reparam)
        if self.check:
            bad = incompatible_pair(self)
            if bad is not None:
                raise WellDefinednessError(
                    f"rays {bad[0]!r} and {bad[1]!r} share a point with two different images", bad
                )

    @classmethod
    def identity(cls, tree: TreePresentation) -> RadialTreeMap:
        ident = PLMap.identity()
        return cls(tree, tree, {r: r for r in tree.rays}, {r: ident for r in tree.rays})

    def distinct_reparams(self) -> list[PLMap]:
        out: list[PLMap] = []
        seen: set[int] = set()
        for r in self.reparam.values():
            if id(r) not in seen:
                seen.add(id(r))
                out.append(r)
        return out


def incompatible_pair(m: RadialTreeMap) -> tuple[str, str] | None:
    """First ray pair violating well-definedness, or None.

    Rays ``F``, ``G`` meeting at level ``k`` share the arc above ``k``; their
    reparametrisations must agree there and the images must still be merged
    at ``r(k)``.
    """
    rays = m.source.rays
    cache: dict[tuple[int, Fraction], Fraction] = {}
    for i, f in enumerate(rays):
        rf = m.reparam[f]
        for g in rays[i + 1 :]:
            k = m.source.carrier_meet(f, g)
            rg = m.reparam[g]
            if rf is not rg and rf != rg and not rf.agrees_on(rg, k):
                return (f, g)
            key = (id(rf), k)
            if key not in cache:
                cache[key] = rf(k)
            if m.target.carrier_meet(m.sigma[f], m.sigma[g]) > cache[key]:
                return (f, g)
    return None


def eval_tree_map(m: RadialTreeMap, x: TreePoint, *, verify: bool = False) -> TreePoint:
    m.source.check_point(x)
    image = TreePoint(m.sigma[x.carrier], m.reparam[x.carrier](x.level))
    if verify:
        for other in m.source.carriers_through(x):
            alt = TreePoint(m.sigma[other], m.reparam[other](x.level))
            if not m.target.same_point(image, alt):
                raise WellDefinednessError(
                    f"point {x} has images {image} and {alt}", (x.carrier, other)
                )
    return image


def compose(first: RadialTreeMap, second: RadialTreeMap) -> RadialTreeMap:
    """``second`` after ``first``."""
    if first.target != second.source:
        raise InputError("radial maps are not composable")
    cache: dict[tuple[int, int], PLMap] = {}
    reparam = {}
    sigma = {}
    for f in first.source.rays:
        mid = first.sigma[f]
        r1, r2 = first.reparam[f], second.reparam[mid]
        key = (id(r2), id(r1))
        if key not in cache:
            cache[key] = r2.compose(r1)
        reparam[f] = cache[key]
        sigma[f] = second.sigma[mid]
    return RadialTreeMap(first.source, second.target, sigma, reparam)


# induced maps ---------------------------------------------------------------


def induce_tree_map(f: EndMap) -> RadialTreeMap:
    """Non-expansive tree map between the dendrograms, driven by the majorant of f."""
    lam = concave_majorant(modulus_of(f))
    source, target = tree_of(f.source), tree_of(f.target)
    return RadialTreeMap(source, target, dict(f.assignment), {x: lam for x in source.rays})


def _positive_everywhere(r: PLMap) -> bool:
    return r.ys[0] > 0 or r.ys[1] > 0


def is_metrically_proper(m: RadialTreeMap) -> bool:
    return all(r.ys[0] == 0 and _positive_everywhere(r) for r in m.reparam.values())


def radius_witness(m: RadialTreeMap, target_level) -> Fraction:
    """Largest source level ``u_N`` with every ray's image at or below ``target_level``.

    In depth terms: points at depth >= N are sent to depth >= M.
    """
    if not is_metrically_proper(m):
        raise PropernessError("map is not metrically proper")
    u_m = _as_level(target_level)
    return min(r.upper_inverse(u_m) for r in m.distinct_reparams())


def _as_level(value) -> Fraction:
    if isinstance(value, TreeDistance):
        return 1 / value.q
    value = Fraction(value)
    if not 0 < value <= 1:
        raise InputError("level must lie in (0, 1]")
    return value


def check_metrically_proper(m: RadialTreeMap) -> CheckReport:
    failing = sorted(f for f, r in m.reparam.items() if not (r.ys[0] == 0 and _positive_everywhere(r)))
    if failing:
        return CheckReport(
            "proper",
            False,
            f"{len(failing)} ray(s) keep a bounded image: the preimage of a bounded set is unbounded",
            {"failing_rays": failing, "floor_levels": {f: m.reparam[f].ys[0] for f in failing}},
        )
    levels = sorted({m.target.carrier_meet(a, b) for a in m.target.rays for b in m.target.rays if a != b} - {ONE})
    probes = sorted(set(levels) | {lv / 2 for lv in levels} | {Fraction(1, 2)}, reverse=True)
    witnesses = [(u, radius_witness(m, u)) for u in probes]
    return CheckReport(
        "proper", True, "every reparametrisation vanishes only at 0", {"witnesses": witnesses}
    )


def depth_slope_bound(r: PLMap) -> Fraction:
    """Supremum over u > 0 of the slope of t -> -ln r(e^{-t}).

    On a segment r(u) = a*u + b the depth slope is a*u / r(u), monotone in u,
    so the segment endpoints (or the limit at 0) give the extremes.
    """
    best = ZERO
    for x0, x1, y0, y1 in zip(r.xs, r.xs[1:], r.ys, r.ys[1:]):
        a = (y1 - y0) / (x1 - x0)
        b = y0 - a * x0
        ends = [x1] if x0 == 0 else [x0, x1]
        for u in ends:
            best = max(best, a * u / (a * u + b))
        if x0 == 0 and b == 0 and a > 0:
            best = max(best, ONE)
    return best


def check_bornologous(m: RadialTreeMap) -> CheckReport:
    const = max(depth_slope_bound(r) for r in m.distinct_reparams())
    proper = is_metrically_proper(m)
    return CheckReport(
        "coarse",
        True,
        f"bornologous with constant {const}; {'coarse' if proper else 'not proper, so not coarse'}",
        {"constant": const, "coarse": proper},
    )


# Lipschitz -------------------------------------------------------------------


class _IntPL:
    """Evaluates a PL map at ``num/den`` into an unreduced ``(num, den)`` pair."""

    def __init__(self, r: PLMap):
        self.fxs = [float(x) for x in r.xs]
        self.xs = [(x.numerator, x.denominator) for x in r.xs]
        self.segments = []
        for x0, x1, y0, y1 in zip(r.xs, r.xs[1:], r.ys, r.ys[1:]):
            slope = (y1 - y0) / (x1 - x0)
            const = y0 - slope * x0
            self.segments.append(
                (slope.numerator, slope.denominator, const.numerator, const.denominator)
            )

    def segment(self, un: int, ud: int) -> int:
        last = len(self.segments) - 1
        i = min(bisect_right(self.fxs, un / ud) - 1, last)
        # the float guess is only trusted after an exact bracket check
        while i > 0 and un * self.xs[i][1] < self.xs[i][0] * ud:
            i -= 1
        while i < last and un * self.xs[i + 1][1] >= self.xs[i + 1][0] * ud:
            i += 1
        return i

    def __call__(self, un: int, ud: int) -> tuple[int, int]:
        sn, sd, cn, cd = self.segments[self.segment(un, ud)]
        return sn * un * cd + cn * sd * ud, sd * ud * cd


def _max3(a: tuple[int, int], b: tuple[int, int], c: tuple[int, int]) -> tuple[int, int]:
    best = a
    for other in (b, c):
        if other[0] * best[1] > best[0] * other[1]:
            best = other
    return best


# A raw point is (carrier, level numerator, level denominator).
RawPoint = tuple[str, int, int]


def _raw(p: TreePoint) -> RawPoint:
    return (p.carrier, p.level.numerator, p.level.denominator)


def sample_raw_points(tree: TreePresentation, rng: random.Random, count: int, denom: int = 4096) -> list[RawPoint]:
    rays = tree.rays
    k = len(rays)
    rand = rng.random
    return [(rays[int(rand() * k)], int(rand() * denom) + 1, denom) for _ in range(count)]


def sample_points(tree: TreePresentation, rng: random.Random, count: int, denom: int = 4096) -> list[TreePoint]:
    return [TreePoint(c, Fraction(n, d)) for c, n, d in sample_raw_points(tree, rng, count, denom)]


def breakpoint_points(m: RadialTreeMap) -> list[TreePoint]:
    """Points at every level where some piece of the map changes behaviour."""
    src, tgt = m.source, m.target
    tgt_levels = {tgt.level(n) for n in tgt.node_ids()} - {ONE}
    out = set()
    for f in src.rays:
        r = m.reparam[f]
        levels = {x for x in r.xs if x > 0}
        levels |= {src.carrier_meet(f, g) for g in src.rays if g != f}
        for lv in tgt_levels:
            u = r.upper_inverse(lv)
            if u is not None and u > 0:
                levels.add(u)
        levels.add(min(levels) / 2)
        for lv in levels:
            out.add(src.normalize(TreePoint(f, lv)))
    return sorted(out)


def _lipschitz_failures(m: RadialTreeMap, pairs: Iterable[tuple[RawPoint, RawPoint]]):
    """Count pairs and collect those where the image is farther apart than the source.

    With levels as integer pairs the test ``mt^2 / (fx fy) <= ms^2 / (x y)``
    is one cross-multiplied comparison.
    """
    src, tgt = m.source, m.target
    evaluators = {id(r): _IntPL(r) for r in m.distinct_reparams()}
    by_ray = {f: evaluators[id(r)] for f, r in m.reparam.items()}
    images: dict[RawPoint, tuple[str, tuple[int, int]]] = {}
    src_meets: dict[tuple[str, str], tuple[int, int]] = {}
    tgt_meets: dict[tuple[str, str], tuple[int, int]] = {}

    def lookup(table, tree, a, b):
        key = (a, b)
        if key not in table:
            v = tree.carrier_meet(a, b)
            table[key] = (v.numerator, v.denominator)
        return table[key]

    def image(p: RawPoint):
        c, n, d = p
        if c not in by_ray or not 0 < n <= d:
            raise InputError(f"point ({c}, {n}/{d}) is not in the source tree")
        out = images[p] = (m.sigma[c], by_ray[c](n, d))
        return out

    failures = []
    count = 0
    for x, y in pairs:
        count += 1
        cx, fx = images.get(x) or image(x)
        cy, fy = images.get(y) or image(y)
        ux, uy = (x[1], x[2]), (y[1], y[2])
        ms = _max3(lookup(src_meets, src, x[0], y[0]), ux, uy)
        mt = _max3(lookup(tgt_meets, tgt, cx, cy), fx, fy)
        lhs = mt[0] * mt[0] * ux[0] * uy[0] * ms[1] * ms[1] * fx[1] * fy[1]
        rhs = ms[0] * ms[0] * fx[0] * fy[0] * mt[1] * mt[1] * ux[1] * uy[1]
        if lhs > rhs:
            failures.append((x, y))
    return count, failures


def _report(count: int, failures) -> CheckReport:
    shown = [
        [TreePoint(c, Fraction(n, d)) for c, n, d in pair] for pair in failures[:20]
    ]
    return CheckReport(
        "lipschitz",
        not failures,
        f"{count} pairs, {len(failures)} failures",
        {"pairs": count, "failures": shown},
    )


def check_lipschitz1(m: RadialTreeMap, pairs: Iterable[tuple[TreePoint, TreePoint]]) -> CheckReport:
    """Exact test of d(m x, m y) <= d(x, y) on the given pairs."""
    return _report(*_lipschitz_failures(m, ((_raw(x), _raw(y)) for x, y in pairs)))


def check_lipschitz1_sampled(
    m: RadialTreeMap, samples: int, rng: random.Random, exhaustive: bool = True
) -> CheckReport:
    """``samples`` random pairs plus, optionally, every pair of breakpoint points."""
    pts = sample_raw_points(m.source, rng, 2 * samples)
    pairs = list(zip(pts[::2], pts[1::2]))
    if exhaustive:
        bps = [_raw(p) for p in breakpoint_points(m)]
        pairs.extend((x, y) for i, x in enumerate(bps) for y in bps[i + 1 :])
    return _report(*_lipschitz_failures(m, pairs))


# cut sets and component maps ----------------------------------------------------


@dataclass(frozen=True)
class ComponentMap:
    target_level: Fraction
    source_level: Fraction
    association: dict[TreePoint, TreePoint]
    source_components: dict[TreePoint, frozenset[str]]
    target_components: dict[TreePoint, frozenset[str]]

    def image_of_ray(self, ray: str) -> TreePoint:
        return self.association[component_of(self.source_components, ray)]


def component_map(m: RadialTreeMap, target_level, source_level=None) -> ComponentMap:
    """Map from the source cut set at depth N to the target cut set at depth M.

    ``source_level`` defaults to the properness witness; a deeper (smaller)
    level may be supplied, never a shallower one.
    """
    u_m = _as_level(target_level)
    if u_m >= 1:
        raise InputError("target cut level must be < 1")
    witness = radius_witness(m, u_m)
    u_n = witness if source_level is None else _as_level(source_level)
    if u_n > witness:
        raise InputError("source level is shallower than the properness witness")
    src = components_beyond(m.source, u_n)
    tgt = components_beyond(m.target, u_m)
    assoc: dict[TreePoint, TreePoint] = {}
    for point, carriers in src.items():
        images = {component_of(tgt, m.sigma[f]) for f in carriers}
        if len(images) != 1:
            raise WellDefinednessError(f"component at {point} splits across the target cut")
        assoc[point] = images.pop()
    return ComponentMap(u_m, u_n, assoc, src, tgt)


def _meet_levels(tree: TreePresentation) -> set[Fraction]:
    rays = tree.rays
    return {tree.carrier_meet(a, b) for i, a in enumerate(rays) for b in rays[i + 1 :]}


def separating_level(tree: TreePresentation) -> Fraction:
    """A level strictly below every meet, where each ray is its own component."""
    return min(_meet_levels(tree) | {ONE}) / 2


def induce_end_map(m: RadialTreeMap) -> EndMap:
    """End map of a proper radial map, confirmed by chasing components down the cut sets."""
    if not is_metrically_proper(m):
        raise PropernessError("only metrically proper maps induce end maps")
    deep = separating_level(m.target)
    levels = sorted((_meet_levels(m.target) - {ONE}) | {deep}, reverse=True)
    for u_m in levels:
        cm = component_map(m, u_m)
        for f in m.source.rays:
            if m.sigma[f] not in cm.target_components[cm.image_of_ray(f)]:
                raise WellDefinednessError(f"ray {f!r} escapes its image component at level {u_m}")
    final = component_map(m, deep)
    for f in m.source.rays:
        (g,) = final.target_components[final.image_of_ray(f)]
        if g != m.sigma[f]:
            raise WellDefinednessError(f"cut chase disagrees with sigma at ray {f!r}")
    return EndMap(ends_of(m.source).space, ends_of(m.target).space, m.sigma)


def component_maps_agree(m: RadialTreeMap, other: RadialTreeMap) -> bool:
    """Compare the component maps of two maps at a level deep enough for both."""
    u_m = separating_level(m.target)
    u_n = min(radius_witness(m, u_m), radius_witness(other, u_m), separating_level(m.source))
    a = component_map(m, u_m, u_n).association
    b = component_map(other, u_m, u_n).association
    return a == b


def maps_equivalent(m: RadialTreeMap, other: RadialTreeMap) -> bool:
    """Whether the two maps induce the same end map (equivalently, are properly homotopic)."""
    if m.source != other.source or m.target != other.target:
        raise InputError("maps must share source and target")
    if not (is_metrically_proper(m) and is_metrically_proper(other)):
        raise PropernessError("equivalence is defined for metrically proper maps")
    same_ends = all(m.sigma[f] == other.sigma[f] for f in m.source.rays)
    if component_maps_agree(m, other) != same_ends:
        raise AssertionError("component maps and end maps disagree")
    return same_ends


# the non-properness family ----------------------------------------------------------------


def star_space(n: int, near: Fraction, far: Fraction, apex: str = "y") -> FiniteUltrametricSpace:
    """``n`` points pairwise at ``near`` plus one point at ``far`` from all of them."""
    labels = [f"x{k:03d}" for k in range(n)] + [apex]
    rows = []
    for i in range(n + 1):
        row = []
        for j in range(n + 1):
            if i == j:
                row.append(ZERO)
            elif i == n or j == n:
                row.append(far)
            else:
                row.append(near)
        rows.append(row)
    return FiniteUltrametricSpace(labels, rows)


def star_family_map(n: int, d1: Fraction, d0: Fraction, d0p: Fraction) -> EndMap:
    if not (0 < d1 < d0 < d0p <= 1):
        raise InputError("the family needs 0 < d1 < d0 < d0' <= 1")
    src = star_space(n, d1, d0)
    tgt = star_space(n, d1, d0p)
    return EndMap(src, tgt, {x: x for x in src.labels})


def preimage_cut_witness(m: RadialTreeMap, ball_level) -> tuple[Fraction, list[TreePoint]]:
    """Deepest level whose whole cut set maps into the closed ball of level ``ball_level``.

    The closed ball of depth ``-ln(ball_level)`` is every point at level
    ``>= ball_level``; a ray's preimage of it is ``[lower_inverse, 1]``.
    """
    u_b = _as_level(ball_level)
    u_star = max(r.lower_inverse(u_b) for r in m.distinct_reparams())
    return u_star, cut_set(m.source, u_star)


def properness_counterexample(
    n: int, d1=Fraction(1, 4), d0=Fraction(1, 2), d0p=Fraction(3, 4)
) -> CheckReport:
    """Finite stage of the metrically-proper-but-not-proper family."""
    m = induce_tree_map(star_family_map(n, Fraction(d1), Fraction(d0), Fraction(d0p)))
    u_star, points = preimage_cut_witness(m, d1)
    return CheckReport(
        "not-proper-family",
        len(points) >= n and u_star < d1,
        f"preimage of the closed ball at level {d1} contains a cut set of {len(points)} points",
        {"n": n, "cut_level": u_star, "witness_cardinality": len(points)},
    )


def random_compatible_reparams(
    m: RadialTreeMap, rng: random.Random, denom: int = 64
) -> dict[str, PLMap]:
    """Per-ray reparametrisations equal to ``m``'s above each ray's last branch point.

    Below that point a ray is alone, so any warp keeping the value there is
    still well defined.
    """
    src = m.source
    out = {}
    for f in src.rays:
        r = m.reparam[f]
        others = [src.carrier_meet(f, g) for g in src.rays if g != f]
        p = min(others) if others else ONE
        knots = sorted({Fraction(rng.randint(1, denom - 1), denom) * p for _ in range(rng.randint(0, 3))})
        vals = sorted(Fraction(rng.randint(1, denom - 1), denom) * p for _ in knots)
        warp_pts = [(ZERO, ZERO)] + list(zip(knots, vals)) + [(p, p)]
        if p < 1:
            warp_pts.append((ONE, ONE))
        warp = PLMap.from_points(warp_pts).simplified()
        out[f] = r.compose(warp)
    return out


def end_map_pairs(space: FiniteUltrametricSpace) -> Sequence[tuple[str, str]]:
    labs = space.labels
    return [(a, b) for i, a in enumerate(labs) for b in labs[i + 1 :]]
