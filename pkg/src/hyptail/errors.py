"""Exception hierarchy shared by all hyptail modules."""


class HyptailError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(HyptailError, ValueError):
    """Distribution parameters violate their validity constraints."""


class DomainError(HyptailError, ArithmeticError):
    """An interval subexpression left the real numbers."""


class EmptyTail(HyptailError, ValueError):
    """Conditioning on an event of probability zero."""


class InvalidSpec(HyptailError, ValueError):
    """A sweep grid description could not be parsed or expanded."""
