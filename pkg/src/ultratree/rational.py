"""Parsing and formatting of exact rationals ("p/q" strings)."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import InputError


def parse_rational(value) -> Fraction:
    """Parse ``value`` as an exact rational.

    Accepts ``Fraction``/``int`` objects and strings such as ``"3"``,
    ``"-1/4"``. Floats are refused: they would smuggle rounding into an
    exact kernel.
    """
    if type(value) is Fraction:
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE_ "):
            raise InputError(f"not a rational string: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational string: {value!r}") from exc
    raise InputError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_level(value) -> Fraction:
    """Validate a level coordinate u in (0, 1]."""
    u = parse_rational(value)
    if not 0 < u <= 1:
        raise InputError(f"level must lie in (0, 1], got {format_rational(u)}")
    return u


def depth_of(level: Fraction) -> float:
    """Depth t = -ln u of a level; display only."""
    return -math.log(level.numerator) + math.log(level.denominator)
