"""Exception types shared across the package."""


class AffharmError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(AffharmError):
    """An input fails a structural or numerical validation check."""


class InvalidGroupSpec(ValidationError):
    """Group description is malformed (bad table, unknown generator, ...)."""


class NotSymmetric(ValidationError):
    """Measure weights differ between an element and its inverse."""


class NotAdapted(ValidationError):
    """Measure support could not be certified to generate the group."""


class NotNormalized(ValidationError):
    """Measure weights are not positive or do not sum to one."""


class NotUnitary(ValidationError):
    """A generator image fails the unitarity test."""

    def __init__(self, generator, residual):
        self.generator = generator
        self.residual = residual
        super().__init__(f"image of {generator!r} is not unitary (residual {residual:.3e})")


class RelatorViolated(ValidationError):
    """A relator does not evaluate to the identity under the representation."""

    def __init__(self, relator, residual):
        self.relator = relator
        self.residual = residual
        super().__init__(f"relator {relator!r} violated (residual {residual:.3e})")


class UnsupportedGroupKind(ValidationError):
    """The operation needs a normal form this group kind does not supply."""


class NotInvariant(ValidationError):
    """A subspace is not invariant under the algebra acting on it."""


class NotFactor(ValidationError):
    """The algebra has a nontrivial center where a factor is required."""


class ParseError(ValidationError):
    """Problem specification file is malformed."""


class DegenerateBlock(AffharmError):
    """Numerical rank of a central block is ambiguous at tolerance."""


class GapTooSmall(AffharmError):
    """The averaging operator is too close to 1 on the reduced space to invert."""


class CocycleIdentityViolated(AffharmError):
    """A constructed cocycle fails the defining identity; signals a convention bug."""
