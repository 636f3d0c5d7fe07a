"""Moduli of continuity and their least concave majorants.

A finite end map has a step modulus: the largest image distance over source
pairs at distance at most ``delta``. Taking the supremum of chords of that
step graph (with the value at 1 raised to 1) gives a piecewise-linear,
nondecreasing, concave ``lam`` on ``[0, 1]`` with ``lam(0) = 0`` and
``lam(1) = 1``. Every object here is exact.
"""

from __future__ import annotations

from bisect import bisect_right
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .endmaps import EndMap
from .errors import InputError
from .rational import format_rational, parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class StepModulus:
    """Right-continuous nondecreasing step function on ``[0, 1]``.

    ``values[i]`` holds on ``[breakpoints[i], breakpoints[i+1])``.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        bps = tuple(parse_rational(b) for b in self.breakpoints)
        vals = tuple(parse_rational(v) for v in self.values)
        if len(bps) != len(vals) or not bps:
            raise InputError("breakpoints and values must be non-empty and of equal length")
        if bps[0] != 0 or vals[0] != 0:
            raise InputError("a modulus starts at (0, 0)")
        if any(a >= b for a, b in zip(bps, bps[1:])) or bps[-1] > 1:
            raise InputError("breakpoints must increase within [0, 1]")
        if any(a > b for a, b in zip(vals, vals[1:])) or not all(0 <= v <= 1 for v in vals):
            raise InputError("values must be nondecreasing within [0, 1]")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_steps(cls, steps: Iterable[tuple]) -> StepModulus:
        """Build from ``(breakpoint, value)`` pairs, dropping steps that change nothing."""
        bps, vals = [ZERO], [ZERO]
        for b, v in sorted((parse_rational(b), parse_rational(v)) for b, v in steps):
            if b == 0:
                if v != 0:
                    raise InputError("a modulus vanishes at 0")
                continue
            v = max(v, vals[-1])
            if v == vals[-1]:
                continue
            bps.append(b)
            vals.append(v)
        return cls(tuple(bps), tuple(vals))

    def __call__(self, delta) -> Fraction:
        delta = parse_rational(delta)
        if delta < 0:
            raise InputError("modulus argument must be >= 0")
        return self.values[bisect_right(self.breakpoints, delta) - 1]

    def graph_points(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.breakpoints, self.values))

    def to_json(self) -> list[list[str]]:
        return [[format_rational(b), format_rational(v)] for b, v in self.graph_points()]


@dataclass(frozen=True)
class PLMap:
    """Continuous nondecreasing piecewise-linear map ``[0, 1] -> [0, 1]``."""

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    def __post_init__(self):
        xs = tuple(parse_rational(x) for x in self.xs)
        ys = tuple(parse_rational(y) for y in self.ys)
        if len(xs) != len(ys) or len(xs) < 2:
            raise InputError("a PL map needs at least two breakpoints")
        if xs[0] != 0 or xs[-1] != 1:
            raise InputError("PL map breakpoints must span [0, 1]")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise InputError("PL map breakpoints must increase strictly")
        if any(a > b for a, b in zip(ys, ys[1:])):
            raise InputError("PL map must be nondecreasing")
        if not all(0 <= y <= 1 for y in ys):
            raise InputError("PL map values must lie in [0, 1]")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> PLMap:
        pts = [(parse_rational(x), parse_rational(y)) for x, y in points]
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts))

    @classmethod
    def identity(cls) -> PLMap:
        return cls((ZERO, ONE), (ZERO, ONE))

    def points(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.xs, self.ys))

    def __call__(self, u) -> Fraction:
        if not isinstance(u, Fraction):
            u = parse_rational(u)
        xs, ys = self.xs, self.ys
        if not 0 <= u <= 1:
            raise InputError("PL map argument must lie in [0, 1]")
        i = bisect_right(xs, u) - 1
        if i >= len(xs) - 1:
            return ys[-1]
        x0, y0 = xs[i], ys[i]
        if u == x0:
            return y0
        return y0 + (ys[i + 1] - y0) * (u - x0) / (xs[i + 1] - x0)

    def slopes(self) -> list[Fraction]:
        return [
            (y1 - y0) / (x1 - x0)
            for x0, x1, y0, y1 in zip(self.xs, self.xs[1:], self.ys, self.ys[1:])
        ]

    def simplified(self) -> PLMap:
        """Same function with collinear interior breakpoints removed."""
        pts = self.points()
        keep = [pts[0]]
        for k in range(1, len(pts) - 1):
            if _cross(keep[-1], pts[k], pts[k + 1]) != 0:
                keep.append(pts[k])
        keep.append(pts[-1])
        return PLMap(tuple(p[0] for p in keep), tuple(p[1] for p in keep))

    def preimages(self, value: Fraction) -> list[Fraction]:
        """Points strictly inside segments where the map crosses ``value``."""
        out = []
        for x0, x1, y0, y1 in zip(self.xs, self.xs[1:], self.ys, self.ys[1:]):
            if y0 < value < y1:
                out.append(x0 + (value - y0) * (x1 - x0) / (y1 - y0))
        return out

    def compose(self, inner: PLMap) -> PLMap:
        """``self`` after ``inner``."""
        xs = set(inner.xs)
        for b in self.xs:
            xs.update(inner.preimages(b))
        xs_sorted = sorted(xs)
        return PLMap(tuple(xs_sorted), tuple(self(inner(x)) for x in xs_sorted)).simplified()

    def upper_inverse(self, value) -> Fraction | None:
        """Largest ``u`` with ``self(u) <= value``; None if there is none."""
        value = parse_rational(value)
        xs, ys = self.xs, self.ys
        if ys[0] > value:
            return None
        k = max(i for i, y in enumerate(ys) if y <= value)
        if k == len(xs) - 1:
            return ONE
        return xs[k] + (value - ys[k]) * (xs[k + 1] - xs[k]) / (ys[k + 1] - ys[k])

    def lower_inverse(self, value) -> Fraction | None:
        """Smallest ``u`` with ``self(u) >= value``; None if there is none."""
        value = parse_rational(value)
        xs, ys = self.xs, self.ys
        if ys[-1] < value:
            return None
        k = min(i for i, y in enumerate(ys) if y >= value)
        if k == 0:
            return ZERO
        return xs[k - 1] + (value - ys[k - 1]) * (xs[k] - xs[k - 1]) / (ys[k] - ys[k - 1])

    def agrees_on(self, other: PLMap, lo: Fraction, hi: Fraction = ONE) -> bool:
        """Exact equality of two PL maps on ``[lo, hi]``."""
        probes = {lo, hi}
        probes.update(x for x in self.xs if lo < x < hi)
        probes.update(x for x in other.xs if lo < x < hi)
        return all(self(x) == other(x) for x in probes)

    def to_json(self) -> list[list[str]]:
        return [[format_rational(x), format_rational(y)] for x, y in self.points()]


class ConcaveMajorant(PLMap):
    """PL map with ``lam(0) = 0``, ``lam(1) = 1`` and strictly decreasing slopes."""

    def __post_init__(self):
        super().__post_init__()
        if self.ys[0] != 0 or self.ys[-1] != 1:
            raise InputError("a normalized majorant runs from (0, 0) to (1, 1)")
        slopes = self.slopes()
        if any(a <= b for a, b in zip(slopes, slopes[1:])):
            raise InputError("majorant slopes must decrease strictly")


def modulus_of(f: EndMap) -> StepModulus:
    """Step modulus: rho(delta) = max d(f x, f y) over pairs with d(x, y) <= delta."""
    best: dict[Fraction, Fraction] = {}
    for x, y, d in f.source.pairs():
        img = f.target.d(f(x), f(y))
        best[d] = max(img, best.get(d, ZERO))
    return StepModulus.from_steps(best.items())


def upper_hull(points: Iterable[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    """Upper convex hull, left to right, without collinear points."""
    top: dict[Fraction, Fraction] = {}
    for x, y in points:
        if x not in top or y > top[x]:
            top[x] = y
    hull: list[tuple[Fraction, Fraction]] = []
    for p in sorted(top.items()):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    return hull


def concave_majorant(rho: StepModulus) -> ConcaveMajorant:
    """Least concave majorant of ``rho`` on ``[0, 1]`` after forcing the value 1 at 1.

    A right-continuous step function attains each value at the left end of
    its step, so the supremum of chords is the upper hull of the breakpoints.
    """
    pts = [(b, v) for b, v in rho.graph_points() if b < 1]
    pts.append((ONE, ONE))
    hull = upper_hull(pts)
    return ConcaveMajorant(tuple(p[0] for p in hull), tuple(p[1] for p in hull))
