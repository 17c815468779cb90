"""The parametric continued fraction map family, digits, orbits, convergents.

The family is T(x) = S(x) - floor(S(x) + 1 - alpha) on [alpha-1, alpha],
with T(0) = 0.  S(x) = 1/x gives the Tanaka-Ito maps (the Gauss map at
alpha = 1), S(x) = 1/|x| the Nakada variant.  Everything here is exact:
digits are integer floors computed in the operands' quadratic field.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DomainError, HeightOverflowError, MixedFieldError, ZeroInputError
from .exactnum import QuadraticNumber

__all__ = [
    "FamilyKind",
    "OrbitPoint",
    "OrbitResult",
    "ConvergentPair",
    "ti_digit",
    "ti_step",
    "nakada_step",
    "gauss_step",
    "orbit",
    "convergents",
]

HEIGHT_LIMIT_BITS = 10**6


class FamilyKind(enum.Enum):
    TANAKA_ITO = "tanaka-ito"
    NAKADA = "nakada"
    GAUSS = "gauss"


def _q(x) -> QuadraticNumber:
    v = QuadraticNumber._coerce(x)
    if v is None:
        raise TypeError(f"not an exact number: {x!r}")
    return v


def _check_domain(alpha: QuadraticNumber, x: QuadraticNumber):
    if (x - (alpha - 1)).sign() < 0 or (x - alpha).sign() > 0:
        raise DomainError(f"{x} outside [{alpha - 1}, {alpha}]")


def ti_digit(alpha, x) -> int:
    """Digit floor(1/x + 1 - alpha); raises ZeroInputError at x = 0."""
    a, v = _q(alpha), _q(x)
    _check_domain(a, v)
    if v.is_zero:
        raise ZeroInputError("x = 0 carries no digit")
    return (v.inverse() + 1 - a).floor()


def ti_step(alpha, x) -> QuadraticNumber:
    a, v = _q(alpha), _q(x)
    _check_domain(a, v)
    if v.is_zero:
        return v
    inv = v.inverse()
    return inv - (inv + 1 - a).floor()


def nakada_step(alpha, x) -> QuadraticNumber:
    a, v = _q(alpha), _q(x)
    _check_domain(a, v)
    if v.is_zero:
        return v
    inv = v.inverse()
    if inv.sign() < 0:
        inv = -inv
    return inv - (inv + 1 - a).floor()


def gauss_step(x) -> QuadraticNumber:
    """Classical Gauss map x -> 1/x - floor(1/x) on [0, 1)."""
    v = _q(x)
    if v.sign() < 0 or v.compare(1) > 0:
        raise DomainError(f"{v} outside [0, 1]")
    if v.is_zero:
        return v
    inv = v.inverse()
    return inv - inv.floor()


def _step_and_digit(kind: FamilyKind, alpha, x):
    v = _q(x)
    if v.is_zero:
        return v, None
    if kind is FamilyKind.GAUSS:
        inv = v.inverse()
        d = inv.floor()
        return inv - d, d
    a = _q(alpha)
    _check_domain(a, v)
    inv = v.inverse()
    if kind is FamilyKind.NAKADA and inv.sign() < 0:
        inv = -inv
    d = (inv + 1 - a).floor()
    return inv - d, d


@dataclass(frozen=True)
class OrbitPoint:
    value: QuadraticNumber
    digit: Optional[int]  # digit emitted to reach this point; None at n = 0
    index: int
    at_discontinuity: bool = False  # 1/x + 1 - alpha landed on an integer


@dataclass(frozen=True)
class OrbitResult:
    points: tuple[OrbitPoint, ...]
    cycle_entry: Optional[int] = None
    cycle_period: Optional[int] = None
    absorbed_at: Optional[int] = None

    @property
    def values(self) -> tuple[QuadraticNumber, ...]:
        return tuple(p.value for p in self.points)


def _is_discontinuity(kind: FamilyKind, alpha, v: QuadraticNumber) -> bool:
    if v.is_zero:
        return True
    inv = v.inverse()
    if kind is FamilyKind.NAKADA and inv.sign() < 0:
        inv = -inv
    if kind is FamilyKind.GAUSS:
        arg = inv
    else:
        arg = inv + 1 - _q(alpha)
    return arg.is_rational and arg.as_fraction().denominator == 1


def orbit(kind: FamilyKind, alpha, x0, n_max: int,
          height_limit_bits: int = HEIGHT_LIMIT_BITS) -> OrbitResult:
    """Exact orbit of x0 up to n_max points, with cycle/absorption metadata.

    Stops early when the value repeats exactly (cycle) or reaches the fixed
    point 0 (absorption).  Points sitting on a discontinuity of the map are
    flagged in the output.
    """
    a = None if kind is FamilyKind.GAUSS else _q(alpha)
    v = _q(x0)
    points: list[OrbitPoint] = []
    seen: dict[QuadraticNumber, int] = {}
    digit: Optional[int] = None
    cycle_entry = cycle_period = absorbed_at = None
    for n in range(n_max + 1):
        if v.bit_size() > height_limit_bits:
            raise HeightOverflowError(f"orbit heights exceeded {height_limit_bits} bits")
        if v in seen:
            cycle_entry = seen[v]
            cycle_period = n - seen[v]
            break
        points.append(OrbitPoint(v, digit, n, _is_discontinuity(kind, a, v)))
        if v.is_zero:
            absorbed_at = n
            break
        seen[v] = n
        if n == n_max:
            break
        v, digit = _step_and_digit(kind, a, v)
    return OrbitResult(tuple(points), cycle_entry, cycle_period, absorbed_at)


@dataclass(frozen=True)
class ConvergentPair:
    p: int
    q: int
    index: int

    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


def convergents(alpha, x, n_max: int,
                kind: FamilyKind = FamilyKind.TANAKA_ITO) -> list[ConvergentPair]:
    """Convergents p_n/q_n of x from the digit recurrence.

    Seeds p(-1)=1, p(0)=0, q(-1)=0, q(0)=1; stops at absorption for
    rational x.  The pairs reproduce the depth-n truncation of the nested
    fraction (verified in the tests against direct evaluation).
    """
    if kind is FamilyKind.NAKADA:
        # the plain recurrence below would drop the sign of the entries
        raise DomainError("convergents are defined for the 1/x families only")
    a = None if kind is FamilyKind.GAUSS else _q(alpha)
    v = _q(x)
    if kind is not FamilyKind.GAUSS:
        _check_domain(a, v)
    p_prev, p_cur = 1, 0
    q_prev, q_cur = 0, 1
    out: list[ConvergentPair] = []
    for n in range(1, n_max + 1):
        if v.is_zero:
            break
        v, d = _step_and_digit(kind, a, v)
        p_prev, p_cur = p_cur, d * p_cur + p_prev
        q_prev, q_cur = q_cur, d * q_cur + q_prev
        if q_cur == 0:
            raise DomainError("degenerate digit sequence: q_n vanished")
        out.append(ConvergentPair(p_cur, q_cur, n))
    return out
