"""Finite ultrametric spaces of diameter at most 1, with exact distances.

Distances are :class:`fractions.Fraction` values in ``{0} U (0, 1]``. The
strong triangle inequality is checked exhaustively; the cubic scan runs on
integer ranks of the distinct distance values, so it stays exact while being
vectorised.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InputError, ValidationFailure
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class Violation:
    """One axiom breach.

    ``kind`` is one of ``diagonal``, ``asymmetry``, ``zero``, ``negative``,
    ``diameter``, ``triangle`` or ``empty``. For ``triangle`` the labels are
    the path ``(x, z, y)`` and the values ``(d(x,y), d(x,z), d(z,y))`` with
    ``d(x,y) > max(d(x,z), d(z,y))``.
    """

    kind: str
    labels: tuple[str, ...]
    values: tuple[Fraction, ...] = ()

    def describe(self) -> str:
        vals = [format_rational(v) for v in self.values]
        if self.kind == "triangle":
            x, z, y = self.labels
            return f"triangle at ({x},{z},{y}): {vals[0]} > max({vals[1]},{vals[2]})"
        return f"{self.kind} at ({','.join(self.labels)}): {', '.join(vals)}"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "labels": list(self.labels),
            "values": [format_rational(v) for v in self.values],
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def triangles(self) -> list[Violation]:
        return [v for v in self.violations if v.kind == "triangle"]

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}


def _parse_matrix(labels: Sequence[str], matrix) -> list[list[Fraction]]:
    labels = list(labels)
    if any(not isinstance(lab, str) for lab in labels):
        raise InputError("point labels must be strings")
    if len(set(labels)) != len(labels):
        raise InputError("duplicate point labels")
    n = len(labels)
    try:
        rows = [list(row) for row in matrix]
    except TypeError as exc:
        raise InputError("distance matrix must be a sequence of rows") from exc
    if len(rows) != n or any(len(row) != n for row in rows):
        raise InputError(f"distance matrix must be {n}x{n}")
    return [[parse_rational(v) for v in row] for row in rows]


def _ranks(rows: list[list[Fraction]]) -> tuple[list[Fraction], np.ndarray]:
    """Distinct values in increasing order and the matrix of their ranks."""
    # (numerator, denominator) keys hash far faster than Fractions do
    keyed = {(v.numerator, v.denominator): v for row in rows for v in row}
    distinct = sorted(keyed.values())
    rank = {(v.numerator, v.denominator): i for i, v in enumerate(distinct)}
    n = len(rows)
    ranks = np.array(
        [rank[(v.numerator, v.denominator)] for row in rows for v in row], dtype=np.int64
    ).reshape(n, n)
    return distinct, ranks


def _triangle_violations(labels, rows, ranks: np.ndarray) -> list[Violation]:
    n = len(labels)
    found = []
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    for z in range(n):
        bound = np.maximum(ranks[:, z][:, None], ranks[z, :][None, :])
        bad = (ranks > bound) & upper
        bad[z, :] = False
        bad[:, z] = False
        for x, y in zip(*np.nonzero(bad)):
            x, y = int(x), int(y)
            found.append(
                Violation(
                    "triangle",
                    (labels[x], labels[z], labels[y]),
                    (rows[x][y], rows[x][z], rows[z][y]),
                )
            )
    found.sort(key=lambda v: v.labels)
    return found


def validate_ultrametric(labels: Sequence[str], matrix) -> ValidationReport:
    """Check every axiom of a finite ultrametric of diameter <= 1.

    Raises :class:`InputError` for malformed input (non-square matrix,
    non-rational entry, duplicate labels); returns a report otherwise.
    """
    labels = list(labels)
    rows = _parse_matrix(labels, matrix)
    n = len(labels)
    if n == 0:
        return ValidationReport((Violation("empty", ()),))
    distinct, ranks = _ranks(rows)
    zero_rank = distinct.index(0) if 0 in distinct else -1
    out: list[Violation] = []
    for i in np.nonzero(np.diag(ranks) != zero_rank)[0]:
        i = int(i)
        out.append(Violation("diagonal", (labels[i],), (rows[i][i],)))
    bad_value = np.array([v <= 0 or v > 1 for v in distinct])
    off = ~np.eye(n, dtype=bool)
    suspicious = ((ranks != ranks.T) | bad_value[ranks]) & off
    for i, j in zip(*np.nonzero(np.triu(suspicious | suspicious.T, k=1))):
        i, j = int(i), int(j)
        a, b = rows[i][j], rows[j][i]
        pair = (labels[i], labels[j])
        if a != b:
            out.append(Violation("asymmetry", pair, (a, b)))
        for v in {a, b}:
            if v == 0:
                out.append(Violation("zero", pair, (v,)))
            elif v < 0:
                out.append(Violation("negative", pair, (v,)))
            elif v > 1:
                out.append(Violation("diameter", pair, (v,)))
    out.extend(_triangle_violations(labels, rows, ranks))
    return ValidationReport(tuple(out))


class FiniteUltrametricSpace:
    """Validated, immutable finite ultrametric space.

    Labels are stored sorted lexicographically, which is also the canonical
    JSON order.
    """

    __slots__ = ("_labels", "_index", "_dist", "_hash", "_rank_cache")

    def __init__(self, labels: Sequence[str], matrix, *, validate: bool = True):
        labels = list(labels)
        if not labels:
            raise InputError("empty ultrametric spaces are not allowed")
        rows = _parse_matrix(labels, matrix)
        if validate:
            report = validate_ultrametric(labels, rows)
            if not report.ok:
                first = report.violations[0].describe()
                raise ValidationFailure(f"not an ultrametric of diameter <= 1: {first}", report)
        order = sorted(range(len(labels)), key=lambda i: labels[i])
        self._labels = tuple(labels[i] for i in order)
        self._index = {lab: k for k, lab in enumerate(self._labels)}
        self._dist = tuple(tuple(rows[i][j] for j in order) for i in order)
        self._hash = None
        self._rank_cache = None

    @classmethod
    def from_pairs(
        cls, points: Sequence[str], pairs: Iterable[tuple[str, str, object]], *, validate=True
    ) -> FiniteUltrametricSpace:
        """Build from ``(x, y, d)`` triples; every unordered pair is required."""
        points = list(points)
        index = {p: k for k, p in enumerate(points)}
        if len(index) != len(points):
            raise InputError("duplicate point labels")
        n = len(points)
        rows: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
        for k in range(n):
            rows[k][k] = Fraction(0)
        explicit: set[tuple[int, int]] = set()
        for x, y, d in pairs:
            if x not in index or y not in index:
                raise InputError(f"distance given for unknown point in pair ({x}, {y})")
            i, j = index[x], index[y]
            value = parse_rational(d)
            rows[i][j] = value
            explicit.add((i, j))
            # a reverse listing keeps its own value so disagreement shows up as asymmetry
            if (j, i) not in explicit:
                rows[j][i] = value
        missing = [
            (points[i], points[j]) for i in range(n) for j in range(i + 1, n) if rows[i][j] is None
        ]
        if missing:
            raise InputError(f"missing distance for pair {missing[0]}")
        return cls(points, rows, validate=validate)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown point {label!r}") from None

    def d(self, x: str, y: str) -> Fraction:
        return self._dist[self.index(x)][self.index(y)]

    def matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._dist

    def pairs(self) -> Iterable[tuple[str, str, Fraction]]:
        labs = self._labels
        for i in range(len(labs)):
            row = self._dist[i]
            for j in range(i + 1, len(labs)):
                yield labs[i], labs[j], row[j]

    def rank_matrix(self) -> tuple[list[Fraction], np.ndarray]:
        """Sorted distinct matrix entries (0 first) and each entry's rank among them."""
        if self._rank_cache is None:
            self._rank_cache = _ranks([list(row) for row in self._dist])
        return self._rank_cache

    def distance_values(self) -> list[Fraction]:
        """Sorted distinct positive distances."""
        return [v for v in self.rank_matrix()[0] if v > 0]

    def diameter(self) -> Fraction:
        return max((d for _, _, d in self.pairs()), default=Fraction(0))

    def first_mismatch(self, other: FiniteUltrametricSpace):
        """First ``(x, y, d_self, d_other)`` where the two spaces differ, or None."""
        if self._labels != other._labels:
            return ("labels", self._labels, other._labels)
        for i, x in enumerate(self._labels):
            for j in range(i + 1, len(self._labels)):
                a, b = self._dist[i][j], other._dist[i][j]
                if a != b:
                    return (x, self._labels[j], a, b)
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteUltrametricSpace):
            return NotImplemented
        return self._labels == other._labels and self._dist == other._dist

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._labels, self._dist))
        return self._hash

    def __repr__(self) -> str:
        return f"FiniteUltrametricSpace({len(self)} points, diameter {format_rational(self.diameter())})"


def ball(space: FiniteUltrametricSpace, center: str, radius, closed: bool = True) -> frozenset[str]:
    r = parse_rational(radius)
    if r < 0:
        raise InputError("radius must be non-negative")
    row = space.matrix()[space.index(center)]
    if closed:
        return frozenset(lab for lab, d in zip(space.labels, row) if d <= r)
    return frozenset(lab for lab, d in zip(space.labels, row) if d < r)


def partition_at(space: FiniteUltrametricSpace, radius) -> list[tuple[str, ...]]:
    """Closed balls of radius ``radius``; they partition the space."""
    r = parse_rational(radius)
    if not 0 <= r <= 1:
        raise InputError("radius must lie in [0, 1]")
    seen: set[str] = set()
    blocks = []
    for lab in space.labels:
        if lab in seen:
            continue
        block = ball(space, lab, r, closed=True)
        seen |= block
        blocks.append(tuple(sorted(block)))
    return sorted(blocks)


@dataclass(frozen=True)
class Triangle:
    kind: str  # "equilateral" or "isosceles"
    long_sides: tuple[tuple[str, str], ...]
    long_value: Fraction
    short_side: tuple[str, str] | None = None
    short_value: Fraction | None = None


def isosceles_witness(space: FiniteUltrametricSpace, x: str, y: str, z: str) -> Triangle:
    """Classify a triangle: the largest side is always attained twice."""
    if len({x, y, z}) != 3:
        raise InputError("isosceles_witness needs three distinct points")
    sides = [((x, y), space.d(x, y)), ((x, z), space.d(x, z)), ((y, z), space.d(y, z))]
    top = max(v for _, v in sides)
    longs = tuple(p for p, v in sides if v == top)
    if len(longs) == 3:
        return Triangle("equilateral", longs, top)
    if len(longs) == 1:
        raise ValidationFailure(f"triangle {x},{y},{z} has a strict unique longest side")
    (short_pair, short_val) = next((p, v) for p, v in sides if v != top)
    return Triangle("isosceles", longs, top, short_pair, short_val)

