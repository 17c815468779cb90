"""Exception hierarchy shared by all alphacf modules."""


class AlphaCFError(Exception):
    """Base class for all library errors."""


class MixedFieldError(AlphaCFError):
    """Arithmetic attempted between two distinct irrational quadratic fields."""


class DivisionByZeroError(AlphaCFError, ZeroDivisionError):
    """Exact inversion of zero."""


class PoleError(AlphaCFError):
    """A Moebius map was applied at its pole."""


class DomainError(AlphaCFError):
    """Input outside the documented domain of an operation."""


class ZeroInputError(DomainError):
    """x = 0 has no digit; the map fixes 0."""


class HeightOverflowError(AlphaCFError):
    """Integer sizes exceeded the configured safety bound."""


class UnsupportedFieldError(AlphaCFError):
    """Exact mode of this operation is limited to the rationals and one fixed field."""


class NotInMatchingIntervalError(AlphaCFError):
    """The parameter belongs to the bifurcation set; no interval to construct."""


class UndecidedError(AlphaCFError):
    """The iteration budget was exhausted without a certificate."""


class PreconditionError(AlphaCFError):
    """A documented precondition failed."""


class StateViolationError(AlphaCFError):
    """Internal self-check failed: no state relation holds (arithmetic bug)."""


class InternalDisagreementError(AlphaCFError):
    """Internal self-check failed: independent procedures disagree."""


class InsufficientResolutionError(AlphaCFError):
    """Too few distinct box counts for a regression."""


class DegenerateOrbitError(AlphaCFError):
    """Too many sampled orbits collapsed onto an exact float zero."""
