"""Machine-readable check reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .rational import format_rational


def jsonable(value):
    """Recursively convert Fractions, tree points and tuples into JSON values."""
    from .rtree import TreeDistance, TreePoint

    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, TreePoint):
        return [value.carrier, format_rational(value.level)]
    if isinstance(value, TreeDistance):
        return {"q": format_rational(value.q), "value": float(value)}
    if isinstance(value, dict):
        return {str(jsonable(k)) if not isinstance(k, str) else k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in value]
        return sorted(items, key=str) if isinstance(value, (set, frozenset)) else items
    return value


@dataclass
class CheckReport:
    check: str
    ok: bool
    summary: str
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.check, "ok": self.ok, "summary": self.summary, "data": jsonable(self.data)}
