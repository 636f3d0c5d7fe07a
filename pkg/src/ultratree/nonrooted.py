"""Ends seen from a base point other than the root.

Moving the base point from the root to ``p`` at level ``u_p`` changes end
distances by at most a factor ``1/u_p`` either way. Everything stays exact.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

from .duality import ends_of
from .endmaps import EndMap
from .errors import InputError
from .reports import CheckReport
from .rtree import TreeDistance, TreePoint, TreePresentation, require_complete
from .ultrametric import FiniteUltrametricSpace


def rerooted_end_distance(tree: TreePresentation, p: TreePoint, f: str, g: str) -> Fraction:
    """End distance between rays ``f`` and ``g`` measured from ``p``.

    Each ray leaves the arc from the root to ``p`` at some level ``k``. Rays
    leaving at different heights part at the lower exit; rays leaving together
    travel up to ``k`` and back down to their own meet.
    """
    if f == g:
        return Fraction(0)
    c, u = p.carrier, Fraction(p.level)
    kf = max(tree.carrier_meet(c, f), u)
    kg = max(tree.carrier_meet(c, g), u)
    if kf != kg:
        return u / min(kf, kg)
    return u * tree.carrier_meet(f, g) / (kf * kf)


def reroot(tree: TreePresentation, p: TreePoint) -> FiniteUltrametricSpace:
    """End space of ``tree`` with ``p`` as base point."""
    require_complete(tree)
    tree.check_point(p)
    rays = tree.rays
    rows = [[rerooted_end_distance(tree, p, a, b) for b in rays] for a in rays]
    return FiniteUltrametricSpace(rays, rows)


@dataclass(frozen=True)
class NonRootedOffset:
    p: TreePoint
    d0: TreeDistance


def nonrooted_end_map(
    tree: TreePresentation, sigma: Mapping[str, str], p: TreePoint
) -> tuple[EndMap, NonRootedOffset, CheckReport]:
    """End map of an isometry of ``tree`` sending the root to ``p``, with its distortion check.

    Target distances must stay within ``[u_p * d, d / u_p]`` of source ones.
    """
    require_complete(tree)
    tree.check_point(p)
    rays = tree.rays
    sigma = dict(sigma)
    if set(sigma) != set(rays) or sorted(sigma.values()) != sorted(rays):
        raise InputError("sigma must be a bijection of the rays")
    source = ends_of(tree).space
    target = reroot(tree, p)
    u = Fraction(p.level)
    violations = []
    for f, g, d in source.pairs():
        d_new = target.d(sigma[f], sigma[g])
        if not (u * d <= d_new <= d / u):
            violations.append({"pair": (f, g), "source": d, "target": d_new})
    offset = NonRootedOffset(p, TreeDistance(1 / u))
    report = CheckReport(
        "bilipschitz",
        not violations,
        f"factor interval [{u}, {1 / u}], {len(violations)} violation(s)",
        {"factor_low": u, "factor_high": 1 / u, "violations": violations[:20]},
    )
    return EndMap(source, target, sigma), offset, report
