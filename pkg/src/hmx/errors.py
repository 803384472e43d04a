"""Exception types shared by the hmx modules."""


class HmxError(Exception):
    """Base class for every error raised by hmx."""


class DomainError(HmxError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotInOrder(DomainError):
    """An element was expected in the stabiliser order of a module."""


class PoleError(HmxError, ZeroDivisionError):
    """A rational function was evaluated at a zero of its denominator."""


class ConvergenceError(HmxError, ArithmeticError):
    """A series did not reach the requested accuracy within max_terms."""


class InputError(HmxError, ValueError):
    """Malformed or inconsistent input data."""


class CertificateError(HmxError):
    """A relation certificate failed its own verification."""


class SizeError(HmxError):
    """A finite computation would exceed its configured size cap."""
