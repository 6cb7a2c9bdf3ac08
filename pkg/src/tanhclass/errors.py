"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Dimensions of parameters or inputs do not agree."""


class WitnessError(ValueError):
    """A reducibility witness does not hold for the parameter it is applied to."""


class PreconditionError(ValueError):
    """An operation was called outside the regime where it is defined."""


class DiscreteClassError(PreconditionError):
    """The parameter is irreducible, so its equivalence class is a finite set."""

    def __init__(self, message: str = "no continuous path exists for irreducible parameters"):
        super().__init__(message)


class EquivalenceError(ValueError):
    """Two parameters were expected to be functionally equivalent but are not."""


class CapacityError(ValueError):
    """An enumeration would exceed the configured size cap."""


class FormatError(ValueError):
    """A serialised file could not be parsed."""
