"""Exact arithmetic over Q and real quadratic fields Q(sqrt(d)).

Values are kept in the canonical form (a + b*sqrt(d))/c with c > 0,
gcd(a, b, c) = 1 and d squarefree (d = 0, b = 0 encodes a rational).
Canonical form is unique per value, so field equality is value equality.
All comparisons are exact integer sign computations; floating point is
never consulted for a decision.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, isqrt

from .errors import (
    DivisionByZeroError,
    DomainError,
    MixedFieldError,
    PoleError,
)

__all__ = [
    "QuadraticNumber",
    "MobiusMap",
    "RcfExpansion",
    "GOLDEN",
    "rcf_expand",
    "rcf_eval",
    "simplest_rational_between",
    "squarefree_decompose",
    "parse_value",
]

_RCF_SAFETY_BOUND = 10**6


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Split n > 0 as s*s*f with f squarefree; returns (s, f).

    Trial division up to the cube root, then the remainder has at most two
    prime factors, so it is squarefree unless it is a perfect square.
    """
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, f = 1, 1
    m = n
    p = 2
    while p * p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                f *= p
        p += 1 if p == 2 else 2
    r = isqrt(m)
    if r * r == m:
        s *= r
    else:
        f *= m
    return s, f


def _as_pair(value) -> tuple[int, int]:
    if isinstance(value, int):
        return value, 1
    if isinstance(value, Fraction):
        return value.numerator, value.denominator
    raise TypeError(f"cannot interpret {value!r} as a rational")


class QuadraticNumber:
    """An element (a + b*sqrt(d))/c of Q(sqrt(d)), or of Q when b = 0."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        if c == 0:
            raise DivisionByZeroError("zero denominator")
        if c < 0:
            a, b, c = -a, -b, -c
        if b == 0 or d == 0:
            b, d = 0, 0
        else:
            s, f = squarefree_decompose(d)
            b *= s
            if f == 1:
                a, b, d = a + b, 0, 0
            else:
                d = f
        if b == 0:
            d = 0
        g = gcd(gcd(abs(a), abs(b)), c)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "c", c // g)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *_):
        raise AttributeError("QuadraticNumber is immutable")

    def __reduce__(self):
        return (QuadraticNumber, (self.a, self.b, self.c, self.d))

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rational(cls, value) -> "QuadraticNumber":
        n, d = _as_pair(value)
        return cls(n, 0, d, 0)

    @classmethod
    def sqrt_of(cls, d: int) -> "QuadraticNumber":
        return cls(0, 1, 1, d)

    # -- predicates / conversions -----------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise DomainError(f"{self} is irrational")
        return Fraction(self.a, self.c)

    def to_interval(self, bits: int = 128) -> tuple[Fraction, Fraction]:
        """Enclosing rational interval [lo, hi] with lo <= value <= hi."""
        if self.is_rational:
            v = Fraction(self.a, self.c)
            return v, v
        r = isqrt(self.d << (2 * bits))
        scale = 1 << bits
        if self.b >= 0:
            lo = Fraction(self.a * scale + self.b * r, self.c * scale)
            hi = Fraction(self.a * scale + self.b * (r + 1), self.c * scale)
        else:
            lo = Fraction(self.a * scale + self.b * (r + 1), self.c * scale)
            hi = Fraction(self.a * scale + self.b * r, self.c * scale)
        return lo, hi

    def __float__(self) -> float:
        lo, hi = self.to_interval(80)
        return float((lo + hi) / 2)

    def approx(self) -> float:
        return float(self)

    # -- arithmetic --------------------------------------------------------

    def _common(self, other: "QuadraticNumber") -> int:
        """Radicand of the smallest field containing both operands."""
        if self.d == other.d:
            return self.d
        if self.d == 0:
            return other.d
        if other.d == 0:
            return self.d
        raise MixedFieldError(
            f"sqrt({self.d}) and sqrt({other.d}) generate different fields"
        )

    @staticmethod
    def _coerce(value):
        if isinstance(value, QuadraticNumber):
            return value
        if isinstance(value, (int, Fraction)):
            return QuadraticNumber.from_rational(value)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self._common(o)
        return QuadraticNumber(
            self.a * o.c + o.a * self.c,
            self.b * o.c + o.b * self.c,
            self.c * o.c,
            d,
        )

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.c, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self._common(o)
        return QuadraticNumber(
            self.a * o.a + self.b * o.b * (self.d if self.d else o.d),
            self.a * o.b + self.b * o.a,
            self.c * o.c,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticNumber":
        if self.is_zero:
            raise DivisionByZeroError("inverse of zero")
        norm = self.a * self.a - self.b * self.b * self.d
        return QuadraticNumber(self.a * self.c, -self.b * self.c, norm, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> "QuadraticNumber":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = QuadraticNumber(1, 0, 1, 0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.a, -self.b, self.c, self.d)

    # -- order -------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign under the real embedding with sqrt(d) > 0."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a*a against b*b*d
        if a > 0:  # b < 0
            return 1 if a * a > b * b * self.d else -1
        return 1 if b * b * self.d > a * a else -1

    def compare(self, other) -> int:
        """Exact three-way comparison; works across distinct fields."""
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare with {other!r}")
        if self.d == o.d or self.d == 0 or o.d == 0:
            return (self - o).sign()
        # Distinct irrational fields never share an irrational value, so the
        # difference is nonzero and interval refinement terminates.
        bits = 64
        while True:
            slo, shi = self.to_interval(bits)
            olo, ohi = o.to_interval(bits)
            if shi < olo:
                return -1
            if slo > ohi:
                return 1
            bits *= 2
            if bits > 1 << 20:  # pragma: no cover
                raise AssertionError("cross-field comparison failed to separate")

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (o.a, o.b, o.c, o.d)

    def __hash__(self):
        if self.is_rational:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def floor(self) -> int:
        """Greatest integer <= value, via integer square root bounds."""
        if self.b == 0:
            return self.a // self.c
        s = isqrt(self.b * self.b * self.d)
        # floor(b*sqrt(d)) is s for b > 0 and -s-1 for b < 0 (value irrational)
        t = self.a + (s if self.b > 0 else -s - 1)
        return t // self.c

    # -- text --------------------------------------------------------------

    def exact_str(self) -> str:
        if self.is_rational:
            return f"{self.a}/{self.c}" if self.c != 1 else str(self.a)
        sign = "+" if self.b >= 0 else "-"
        return f"({self.a}{sign}{abs(self.b)}*sqrt({self.d}))/{self.c}"

    def __repr__(self):
        return f"QuadraticNumber({self.exact_str()})"

    def __str__(self):
        return self.exact_str()

    def bit_size(self) -> int:
        return max(
            self.a.bit_length(), self.b.bit_length(), self.c.bit_length()
        )


#: golden ratio conjugate (sqrt(5)-1)/2, the left edge of the scanned range
GOLDEN = QuadraticNumber(-1, 1, 2, 5)


class MobiusMap:
    """Integer linear fractional map x -> (p*x + q)/(r*x + s)."""

    __slots__ = ("p", "q", "r", "s")

    def __init__(self, p: int, q: int, r: int, s: int):
        if p * s - q * r == 0:
            raise DomainError("singular Moebius map")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)

    def __setattr__(self, *_):
        raise AttributeError("MobiusMap is immutable")

    def __reduce__(self):
        return (MobiusMap, (self.p, self.q, self.r, self.s))

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def digit(cls, a: int) -> "MobiusMap":
        """The branch inverse x -> 1/(a + x) feeding digit a."""
        return cls(0, 1, 1, a)

    def determinant(self) -> int:
        return self.p * self.s - self.q * self.r

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s,
        )

    def __eq__(self, other):
        if not isinstance(other, MobiusMap):
            return NotImplemented
        return (self.p, self.q, self.r, self.s) == (
            other.p,
            other.q,
            other.r,
            other.s,
        )

    def __hash__(self):
        return hash((self.p, self.q, self.r, self.s))

    def apply(self, x) -> QuadraticNumber:
        v = QuadraticNumber._coerce(x)
        if v is None:
            raise TypeError(f"cannot apply Moebius map to {x!r}")
        den = v * self.r + self.s
        if den.is_zero:
            raise PoleError(f"pole of {self} at {v}")
        return (v * self.p + self.q) / den

    __call__ = apply

    def __repr__(self):
        return f"MobiusMap({self.p}, {self.q}, {self.r}, {self.s})"


class RcfExpansion:
    """A finite or eventually periodic regular continued fraction in [0, 1).

    `preperiod` and `period` are tuples of digits >= 1; an empty period
    encodes a rational value.  Construction canonicalizes: a finite
    expansion never ends in 1 (except the single digit [0;1]), the period
    is primitive, and the preperiod is minimal (trailing digits equal to
    the period tail are absorbed by rotating the period).
    """

    __slots__ = ("preperiod", "period")

    def __init__(self, preperiod=(), period=()):
        pre = list(preperiod)
        per = list(period)
        if any(a < 1 for a in pre) or any(a < 1 for a in per):
            raise DomainError("continued fraction digits must be >= 1")
        if per:
            # primitive period
            n = len(per)
            for length in range(1, n):
                if n % length == 0 and per == per[: length] * (n // length):
                    per = per[:length]
                    break
            # minimal preperiod
            while pre and pre[-1] == per[-1]:
                per = [per[-1]] + per[:-1]
                pre.pop()
        elif len(pre) >= 2 and pre[-1] == 1:
            pre.pop()
            pre[-1] += 1
        object.__setattr__(self, "preperiod", tuple(pre))
        object.__setattr__(self, "period", tuple(per))

    def __setattr__(self, *_):
        raise AttributeError("RcfExpansion is immutable")

    def __reduce__(self):
        return (RcfExpansion, (self.preperiod, self.period))

    @property
    def is_finite(self) -> bool:
        return not self.period

    def digit(self, i: int) -> int:
        """1-based digit a_i of the stream."""
        if i < 1:
            raise IndexError("digits are 1-based")
        if i <= len(self.preperiod):
            return self.preperiod[i - 1]
        if not self.period:
            raise IndexError(f"finite expansion has {len(self.preperiod)} digits")
        return self.period[(i - len(self.preperiod) - 1) % len(self.period)]

    def digits(self, count: int) -> tuple[int, ...]:
        if self.is_finite:
            count = min(count, len(self.preperiod))
        return tuple(self.digit(i) for i in range(1, count + 1))

    def __eq__(self, other):
        if not isinstance(other, RcfExpansion):
            return NotImplemented
        return (self.preperiod, self.period) == (other.preperiod, other.period)

    def __hash__(self):
        return hash((self.preperiod, self.period))

    def __str__(self):
        parts = [str(a) for a in self.preperiod]
        if self.period:
            parts.append("(" + ",".join(str(a) for a in self.period) + ")")
        return "[0;" + ",".join(parts) + "]"

    def __repr__(self):
        return f"RcfExpansion({self.preperiod}, {self.period})"

    @classmethod
    def parse(cls, text: str) -> "RcfExpansion":
        m = re.fullmatch(r"\s*\[0;([^\]]*)\]\s*", text)
        if not m:
            raise ValueError(f"not an expansion literal: {text!r}")
        body = m.group(1).strip()
        pre: list[int] = []
        per: list[int] = []
        if body:
            pm = re.search(r"\(([^)]*)\)", body)
            if pm:
                per = [int(t) for t in pm.group(1).split(",") if t.strip()]
                body = body[: pm.start()].rstrip().rstrip(",")
            if body:
                pre = [int(t) for t in body.split(",") if t.strip()]
        return cls(pre, per)


def rcf_expand(x, max_steps: int = _RCF_SAFETY_BOUND) -> RcfExpansion:
    """Regular continued fraction digits of x in [0, 1).

    Rational input runs the Euclidean algorithm; quadratic input iterates
    the classical continued fraction map with exact cycle detection.
    """
    v = QuadraticNumber._coerce(x)
    if v is None:
        raise TypeError(f"cannot expand {x!r}")
    if v.sign() < 0 or v.compare(1) >= 0:
        raise DomainError(f"{v} outside [0, 1)")
    if v.is_rational:
        p, q = v.a, v.c
        digits = []
        while p:
            a, rem = divmod(q, p)
            digits.append(a)
            p, q = rem, p
        return RcfExpansion(digits, ())
    digits = []
    seen: dict[QuadraticNumber, int] = {}
    for step in range(max_steps):
        if v in seen:
            k = seen[v]
            return RcfExpansion(digits[:k], digits[k:])
        seen[v] = step
        inv = v.inverse()
        a = inv.floor()
        digits.append(a)
        v = inv - a
    raise AssertionError("cycle not found within the safety bound")


def rcf_eval(e: RcfExpansion) -> QuadraticNumber:
    """Exact value of an expansion: rational if finite, quadratic otherwise."""
    if e.is_finite:
        v = Fraction(0)
        for a in reversed(e.preperiod):
            v = 1 / (a + v)
        return QuadraticNumber.from_rational(v)
    m = MobiusMap.identity()
    for a in e.period:
        m = m @ MobiusMap.digit(a)
    # value of the purely periodic tail: fixed point of m inside (0, 1)
    disc = (m.s - m.p) ** 2 + 4 * m.q * m.r
    root = None
    for sgn in (1, -1):
        cand = QuadraticNumber(m.p - m.s, sgn, 2 * m.r, disc)
        if cand.sign() > 0 and cand.compare(1) < 0:
            root = cand
            break
    if root is None or root.is_rational:  # pragma: no cover - digit words >= 1
        raise AssertionError(f"no quadratic fixed point in (0,1) for {e}")
    v = root
    for a in reversed(e.preperiod):
        v = (a + v).inverse()
    return v


def simplest_rational_between(lo, hi) -> Fraction:
    """Smallest-denominator rational strictly between lo and hi.

    Stern-Brocot descent with exact comparisons; run lengths are found by
    doubling so deep descents stay logarithmic.
    """
    qlo = QuadraticNumber._coerce(lo)
    qhi = QuadraticNumber._coerce(hi)
    if qlo is None or qhi is None:
        raise TypeError("bounds must be exact numbers")
    if qlo.compare(qhi) >= 0:
        raise DomainError("empty interval")

    def _le_lo(num: int, den: int) -> bool:
        return qlo.compare(Fraction(num, den)) >= 0

    def _ge_hi(num: int, den: int) -> bool:
        return qhi.compare(Fraction(num, den)) <= 0

    ln, ld = 0, 1  # 0/1
    rn, rd = 1, 0  # +infinity
    while True:
        mn, md = ln + rn, ld + rd
        if _le_lo(mn, md):
            # move right: find the largest k with (ln + k*rn)/(ld + k*rd) <= lo
            k = 1
            while _le_lo(ln + 2 * k * rn, ld + 2 * k * rd):
                k *= 2
            step = k
            while step:
                if _le_lo(ln + (k + step) * rn, ld + (k + step) * rd):
                    k += step
                else:
                    step //= 2
            ln, ld = ln + k * rn, ld + k * rd
        elif _ge_hi(mn, md):
            k = 1
            while _ge_hi(rn + 2 * k * ln, rd + 2 * k * ld):
                k *= 2
            step = k
            while step:
                if _ge_hi(rn + (k + step) * ln, rd + (k + step) * ld):
                    k += step
                else:
                    step //= 2
            rn, rd = rn + k * ln, rd + k * ld
        else:
            return Fraction(mn, md)


_QUAD_RE = re.compile(
    r"\s*\(\s*(-?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\s*\(\s*(\d+)\s*\)\s*\)\s*/\s*(-?\d+)\s*"
)


def parse_value(text: str):
    """Parse 'p/q', '(a+b*sqrt(d))/c' or an expansion literal to an exact value.

    Returns a QuadraticNumber (expansion literals are evaluated).
    """
    text = text.strip()
    if text.startswith("[0;"):
        return rcf_eval(RcfExpansion.parse(text))
    m = _QUAD_RE.fullmatch(text)
    if m:
        a, sign, b, d, c = m.groups()
        bval = int(b) if sign == "+" else -int(b)
        return QuadraticNumber(int(a), bval, int(c), int(d))
    m = re.fullmatch(r"\s*(-?\d+)\s*/\s*(\d+)\s*", text)
    if m:
        return QuadraticNumber(int(m.group(1)), 0, int(m.group(2)), 0)
    m = re.fullmatch(r"\s*(-?\d+)\s*", text)
    if m:
        return QuadraticNumber(int(m.group(1)), 0, 1, 0)
    raise ValueError(f"cannot parse exact value: {text!r}")
