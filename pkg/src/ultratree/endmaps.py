"""Maps between finite ultrametric spaces (end maps)."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from .errors import InputError
from .ultrametric import FiniteUltrametricSpace


@dataclass(frozen=True)
class EndMap:
    source: FiniteUltrametricSpace
    target: FiniteUltrametricSpace
    assignment: Mapping[str, str]

    def __post_init__(self):
        assignment = dict(self.assignment)
        missing = [x for x in self.source.labels if x not in assignment]
        if missing:
            raise InputError(f"end map is not total: no image for {missing[0]!r}")
        extra = [x for x in assignment if x not in self.source]
        if extra:
            raise InputError(f"end map assigns unknown source point {extra[0]!r}")
        bad = [y for y in assignment.values() if y not in self.target]
        if bad:
            raise InputError(f"end map hits unknown target point {bad[0]!r}")
        object.__setattr__(self, "assignment", {x: assignment[x] for x in self.source.labels})

    def __call__(self, x: str) -> str:
        return self.assignment[x]

    @classmethod
    def identity(cls, space: FiniteUltrametricSpace) -> EndMap:
        return cls(space, space, {x: x for x in space.labels})

    def then(self, other: EndMap) -> EndMap:
        """``other`` after ``self``."""
        if other.source != self.target:
            raise InputError("end maps are not composable")
        return EndMap(self.source, other.target, {x: other(self(x)) for x in self.source.labels})

    def __eq__(self, other) -> bool:
        if not isinstance(other, EndMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.assignment == other.assignment
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target, tuple(self.assignment.items())))
