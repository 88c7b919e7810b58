"""Exception types shared across the package."""


class OsmatchError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(OsmatchError):
    """An input document could not be parsed or fails schema checks."""


class UnknownIdError(OsmatchError):
    """A student or school id does not exist in the problem."""


class InvalidProblemError(OsmatchError):
    """A problem failed validation; carries the full violation list."""

    def __init__(self, violations: tuple[str, ...]):
        self.violations = violations
        super().__init__("invalid problem: " + "; ".join(violations))


class InvalidMatchingError(OsmatchError):
    """A matching references unknown ids, repeats a student, or overfills a school."""


class TransformError(OsmatchError):
    """A utility transform is malformed, non-increasing, or applied outside its domain."""


class GuardExceededError(OsmatchError):
    """An instance exceeds a hard size guard for an exhaustive or kernel operation."""


class EnumerationIncompleteError(OsmatchError):
    """An operation needed the full optimum set but enumeration was truncated."""


class KernelError(OsmatchError):
    """The assignment kernel failed an internal invariant (for example the iteration cap)."""
