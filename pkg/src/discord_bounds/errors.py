"""Exception hierarchy.

Every error names the violated contract and, where meaningful, the magnitude
of the violation, so callers (and the CLI) can report actionable messages.
"""


class DiscordBoundsError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DiscordBoundsError):
    """A matrix failed one of the density-matrix invariants."""


class NotHermitian(ValidationError):
    pass


class NotUnitTrace(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class WrongDimension(DiscordBoundsError):
    pass


class DimensionTooLarge(DiscordBoundsError):
    pass


class InvalidRank(DiscordBoundsError):
    pass


class InvalidAlpha(DiscordBoundsError):
    pass


class InvalidProbability(DiscordBoundsError):
    pass


class InvalidBlochLength(DiscordBoundsError):
    pass


class SingularFilter(DiscordBoundsError):
    pass


class SingularMarginal(DiscordBoundsError):
    """The qubit marginal is numerically singular; the filtered state is undefined."""

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            f"qubit marginal is numerically singular (min eigenvalue "
            f"{self.min_eigenvalue:.3e} < 1e-10); near-product states have "
            f"near-zero discord, fall back to a direct oracle"
        )


class ComplexSpectrum(DiscordBoundsError):
    pass


class DomainError(DiscordBoundsError):
    pass


class ConditionViolated(DiscordBoundsError):
    """The X-state closed form was requested outside its validity condition."""


class CoincidenceFailed(DiscordBoundsError):
    """Numerical check q2 = t1 of the filtered state failed."""


class RegimeError(DiscordBoundsError):
    """A closed-form bound was requested outside its derivation regime."""


class InvalidPovm(DiscordBoundsError):
    pass
