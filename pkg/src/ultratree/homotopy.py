"""Shortest-path homotopies between two radial maps with a common target.

``H_t(x)`` walks the target arc from ``m(x)`` to ``m'(x)``. Levels along an
arc are real powers of rationals, so this is the one place floats appear.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .morphisms import RadialTreeMap, component_map, eval_tree_map
from .reports import CheckReport
from .rtree import ApproxPoint, TreePoint, approx_distance, geodesic_point, meet

ENDPOINT_TOL = 1e-12
BOUND_TOL = 1e-9


def _same_ends(m: RadialTreeMap, other: RadialTreeMap) -> None:
    if m.source != other.source or m.target != other.target:
        raise InputError("homotopy needs maps with the same source and target")


def homotopy_eval(m: RadialTreeMap, other: RadialTreeMap, x: TreePoint, t) -> ApproxPoint:
    _same_ends(m, other)
    return geodesic_point(m.target, eval_tree_map(m, x), eval_tree_map(other, x), t)


def endpoint_error(m: RadialTreeMap, other: RadialTreeMap, x: TreePoint) -> float:
    """Largest float gap between H_0, H_1 and the two maps at ``x``."""
    start = homotopy_eval(m, other, x, 0)
    end = homotopy_eval(m, other, x, 1)
    return max(
        approx_distance(m.target, start, eval_tree_map(m, x)),
        approx_distance(m.target, end, eval_tree_map(other, x)),
    )


@dataclass(frozen=True)
class BoundSample:
    t: float
    moving: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.moving <= self.bound + BOUND_TOL


def homotopy_bound_check(
    m: RadialTreeMap, other: RadialTreeMap, x: TreePoint, y: TreePoint, t_samples: Iterable[float]
) -> CheckReport:
    """d(H_t x, H_t y) never exceeds the larger of the two endpoint distances."""
    _same_ends(m, other)
    tgt = m.target
    fx, fy = eval_tree_map(m, x), eval_tree_map(m, y)
    gx, gy = eval_tree_map(other, x), eval_tree_map(other, y)
    bound = max(approx_distance(tgt, fx, fy), approx_distance(tgt, gx, gy))
    samples = []
    for t in t_samples:
        hx = geodesic_point(tgt, fx, gx, t)
        hy = geodesic_point(tgt, fy, gy, t)
        samples.append(BoundSample(float(t), approx_distance(tgt, hx, hy), bound))
    bad = [s for s in samples if not s.ok]
    return CheckReport(
        "homotopy-bound",
        not bad,
        f"{len(samples)} times, {len(bad)} above the endpoint bound",
        {"bound": bound, "violations": [(s.t, s.moving) for s in bad]},
    )


def path_stays_in_component(
    m: RadialTreeMap, other: RadialTreeMap, x: TreePoint, target_level, t_samples: Iterable[float] = ()
) -> bool:
    """Exact test that the whole homotopy path of ``x`` stays in one component beyond ``target_level``.

    The arc between the images climbs no higher than their meet, so it lies in
    the component of ``m(x)`` exactly when that meet does. ``x`` must be deep
    enough for both maps (at or below their common component-map level).
    """
    _same_ends(m, other)
    tgt = m.target
    cm = component_map(m, target_level)
    cm_other = component_map(other, target_level)
    depth = min(cm.source_level, cm_other.source_level)
    if x.level > depth:
        raise InputError("point is shallower than the shared cut level")
    fx, gx = eval_tree_map(m, x), eval_tree_map(other, x)
    home = cm.target_components[cm.image_of_ray(x.carrier)]
    top = meet(tgt, fx, gx)
    if top.level > cm.target_level:
        return False
    if fx.carrier not in home or gx.carrier not in home:
        return False
    # sampled points ride on one of the two endpoint carriers
    for t in t_samples:
        h = geodesic_point(tgt, fx, gx, t)
        if h.carrier not in home or h.level > float(cm.target_level) * (1 + ENDPOINT_TOL):
            return False
    return True


def deep_level(m: RadialTreeMap, other: RadialTreeMap, target_level) -> Fraction:
    """Source level at which both maps' component maps for ``target_level`` are defined."""
    return min(
        component_map(m, target_level).source_level,
        component_map(other, target_level).source_level,
    )
