"""Exception types shared across the package.

Every error carries a small certificate explaining *why* the input was
rejected (which minor vanished, which cells disagreed, ...) so that callers
and the command line tool can report actionable diagnostics instead of a
bare failure.
"""

from __future__ import annotations


class FlagPoissonError(Exception):
    """Base class for all domain errors raised by this package."""


class NotInBigCell(FlagPoissonError):
    """Triangular (Gauss) factorization does not exist.

    ``alpha`` is the 1-based index of the first vanishing leading principal
    minor, i.e. the fundamental weight whose minor obstructs the
    factorization.
    """

    def __init__(self, alpha: int, message: str | None = None):
        self.alpha = alpha
        super().__init__(message or f"leading principal minor {alpha} vanishes")


class WrongCell(FlagPoissonError):
    """An element lies in a different Bruhat cell than required."""

    def __init__(self, expected, actual, message: str | None = None):
        self.expected = expected
        self.actual = actual
        super().__init__(message or f"expected cell {expected}, got {actual}")


class CellMismatch(FlagPoissonError):
    """Two points that should share cell data do not."""

    def __init__(self, first, second, message: str | None = None):
        self.first = first
        self.second = second
        super().__init__(message or f"cell data differ: {first} vs {second}")


class NotComposable(FlagPoissonError):
    """Groupoid composition attempted on a non-matching pair.

    Carries the target of the first arrow and the source of the second so
    the mismatch is visible.
    """

    def __init__(self, target, source, message: str | None = None):
        self.target = target
        self.source = source
        super().__init__(message or "target of first arrow != source of second")


class ConstraintViolated(FlagPoissonError):
    """A defining equation of a model (e.g. a product matching condition) fails."""

    def __init__(self, description: str):
        self.description = description
        super().__init__(description)


class NoRationalSqrt(FlagPoissonError):
    """A torus square root was requested but some coordinate is not a rational square."""

    def __init__(self, coordinate: int, value, message: str | None = None):
        self.coordinate = coordinate
        self.value = value
        super().__init__(
            message or f"coordinate {coordinate} = {value} is not a square of a rational"
        )


class OutsideToricChart(FlagPoissonError):
    """A point has a vanishing chart minor, so toric coordinates do not exist.

    ``zero_indices`` lists the 1-based positions of the vanishing minors.
    """

    def __init__(self, zero_indices, message: str | None = None):
        self.zero_indices = tuple(zero_indices)
        super().__init__(message or f"chart minors vanish at positions {self.zero_indices}")


class NotInZeroChart(FlagPoissonError):
    """A prefix product required to be triangularly factorizable is not.

    ``prefix`` is the 1-based length of the offending prefix.
    """

    def __init__(self, prefix: int, message: str | None = None):
        self.prefix = prefix
        super().__init__(message or f"prefix product {prefix} has no triangular factorization")


class NotInOpenLeaf(FlagPoissonError):
    """A point fails the open-locus condition of a leaf-level construction."""

    def __init__(self, description: str):
        self.description = description
        super().__init__(description)


class ZeroParameter(FlagPoissonError):
    """A chart parameter that must be nonzero is zero.  ``index`` is 1-based."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"parameter {index} must be nonzero")


class NotInChartDomain(FlagPoissonError):
    """Generic chart-domain failure with a human-readable reason."""

    def __init__(self, description: str):
        self.description = description
        super().__init__(description)
