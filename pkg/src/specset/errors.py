"""Exception hierarchy.

Every error raised for a violated precondition derives from ``SpecsetError``,
which is itself a ``ValueError`` so callers that only care about bad input
can catch the builtin.
"""


class SpecsetError(ValueError):
    pass


class DimensionMismatchError(SpecsetError):
    def __init__(self, expected, got, what="vector"):
        self.expected = expected
        self.got = got
        super().__init__(f"{what} has dimension {got}, space expects {expected}")


class PoleError(SpecsetError):
    """A denominator vanishes (numerically) at a point or on a region."""

    def __init__(self, message, z=None):
        self.z = z
        super().__init__(message)


class SpectralInclusionError(SpecsetError):
    def __init__(self, offending):
        self.offending = list(offending)
        shown = ", ".join(f"{complex(z):.6g}" for z in self.offending[:8])
        super().__init__(f"spectrum escapes the region: {shown}")


class ContractionViolationError(SpecsetError):
    pass


class DomainError(SpecsetError):
    pass
