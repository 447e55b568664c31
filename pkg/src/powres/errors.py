class PowresError(Exception):
    """Base class for library errors."""


class DomainError(PowresError, ValueError):
    """An argument violates a mathematical precondition (wrong residue class, not prime, ...)."""


class RangeError(DomainError):
    """An argument lies outside the supported numeric range."""


class NotInvertibleError(DomainError, ZeroDivisionError):
    """Raised by mod_inverse when the argument shares a factor with the modulus."""


class IntegrityError(PowresError, RuntimeError):
    """A certificate failed a check the mathematics guarantees; indicates a bug."""
