"""Exception types shared across the package."""


class QNaturalError(Exception):
    """Base class for all library-specific errors."""


class DomainError(QNaturalError):
    """An argument lies outside the mathematical domain of an operation."""


class NonConvergence(QNaturalError):
    """A series, product or lattice limit failed to stabilise within budget."""


class DivergentTransform(QNaturalError):
    """The defining integral of a classical transform does not converge."""


class UnknownForm(QNaturalError):
    """No closed-form rule is registered for the requested function shape."""


class UnknownIdentity(QNaturalError):
    """The requested identity id is not present in the audit registry."""


class ParseError(QNaturalError):
    """Function-expression syntax error, with offset and expected tokens."""

    def __init__(self, message: str, position: int, expected: tuple = ()):
        detail = f"{message} at offset {position}"
        if expected:
            detail += f" (expected {', '.join(expected)})"
        super().__init__(detail)
        self.position = position
        self.expected = tuple(expected)
