"""Exception types shared across the package."""


class DomainError(ValueError):
    """Invalid mathematical input (bad weights, bad index, k out of range, ...)."""


class WindowError(DomainError):
    """A permutation's support escapes the finite window it must live in."""


class SizeLimitError(DomainError):
    """A request exceeds a configured desk-scale size cap."""
