"""Exception hierarchy shared by the kernel and the CLI."""

from __future__ import annotations


class UltratreeError(Exception):
    """Base class for every error raised by this package."""


class InputError(UltratreeError, ValueError):
    """Malformed input: wrong shape, unparsable rational, unknown label.

    Distinct from a validation failure, which means the input parsed but
    breaks a mathematical axiom.
    """


class ValidationFailure(UltratreeError, ValueError):
    """Input parsed but violates an axiom; carries the offending report."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class TrivialTreeError(UltratreeError):
    """The tree has no rays: its end space is empty."""


class NotGeodesicallyCompleteError(UltratreeError):
    """An operation needing a geodesically complete tree got a TIP leaf."""


class WellDefinednessError(UltratreeError):
    """A radial tree map sends one point to two different images."""

    def __init__(self, message: str, pair: tuple[str, str] | None = None):
        super().__init__(message)
        self.pair = pair


class PropernessError(UltratreeError):
    """A tree map is not metrically proper where properness is required."""
