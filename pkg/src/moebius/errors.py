"""Exception types shared across the package."""


class MoebiusError(ValueError):
    """Base class for all errors raised by this package."""


class DomainError(MoebiusError):
    """Input lies outside the domain of an operation (non-finite, out of range)."""


class SingularPointError(MoebiusError):
    """Raised for the excluded point (-1, 0) of the rational functions."""


class PreconditionError(MoebiusError):
    """A documented precondition (grid size, half-width range, ...) is violated."""
