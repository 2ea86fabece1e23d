"""Exception hierarchy shared by every nkit module."""


class NkitError(Exception):
    """Base class for library errors."""


class DomainError(NkitError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ResourceError(NkitError, RuntimeError):
    """A precision, size or iteration cap was hit before the result was certified.

    ``partial`` carries whatever was computed before the cap was reached.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NotAMorphism(DomainError):
    """The forms of a projective self-map share a nontrivial common zero."""


class DivisionByZero(NkitError, ZeroDivisionError):
    pass
