"""Matching detection and matching-interval construction.

A parameter alpha matches with exponents (M, N) when the two orbits of
alpha-1 and alpha under its own map coincide: T^M(alpha-1) = T^N(alpha).
This module traces the exceedance state machine for a single parameter,
builds the containing interval (endpoints, exponents, index, pseudocenter)
from the regular continued fraction digits of alpha, and scans parameter
ranges exhaustively by denominator.

All decisions are exact.  Rational parameters terminate by absorption at 0,
quadratic parameters by exact cycle closure; iteration budgets are a
backstop only.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Union

from .errors import (
    DomainError,
    NotInMatchingIntervalError,
    StateViolationError,
    UndecidedError,
)
from .exactnum import (
    GOLDEN,
    QuadraticNumber,
    RcfExpansion,
    rcf_eval,
    rcf_expand,
    simplest_rational_between,
)

__all__ = [
    "PairState",
    "PairTrace",
    "MatchVerdict",
    "TripleState",
    "TripleTrace",
    "MatchingInterval",
    "ScanResult",
    "pair_trace",
    "detect_matching",
    "match_by_definition",
    "triple_trace",
    "p_counter",
    "interval_from_alpha",
    "scan_intervals",
    "central_intervals",
    "reflect_interval",
    "interval_to_json",
    "interval_from_json",
    "verify_matching_identity",
    "interval_samples",
]

Exact = Union[Fraction, QuadraticNumber]

DEFAULT_BUDGET = 10_000


def as_exact(x) -> Exact:
    """Normalize an exact input to Fraction (rational) or QuadraticNumber."""
    if isinstance(x, QuadraticNumber):
        return x.as_fraction() if x.is_rational else x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    raise TypeError(f"not an exact number: {x!r}")


def _gt_golden(alpha: Exact) -> bool:
    if isinstance(alpha, Fraction):
        t = 2 * alpha.numerator + alpha.denominator
        return t > 0 and t * t > 5 * alpha.denominator**2
    return alpha.compare(GOLDEN) > 0


def _is_golden(alpha: Exact) -> bool:
    return isinstance(alpha, QuadraticNumber) and alpha == GOLDEN


def _ti_step(alpha: Exact, x: Exact) -> Exact:
    """One Tanaka-Ito step; alpha and x rational uses the integer fast path."""
    if isinstance(x, Fraction):
        if not x:
            return x
        if isinstance(alpha, Fraction):
            n, d = x.numerator, x.denominator
            p, q = alpha.numerator, alpha.denominator
            den = n * q
            dig = (d * q + (q - p) * n) // den
            return Fraction(d - dig * n, n)
        inv = Fraction(x.denominator, x.numerator)
        dig = (QuadraticNumber.from_rational(inv) + 1 - alpha).floor()
        return inv - dig
    inv = x.inverse()
    if x.is_zero:
        return x
    dig = (inv + 1 - alpha).floor()
    return inv - dig


def _gauss_step(z: Exact) -> Exact:
    if isinstance(z, Fraction):
        n, d = z.numerator, z.denominator
        return Fraction(d % n, n)
    inv = z.inverse()
    return inv - inv.floor()


# ---------------------------------------------------------------------------
# Gauss-orbit analysis: the shared core behind the Gauss-map membership
# characterization and the interval construction formulas.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussAnalysis:
    """Exact Gauss-orbit data for a parameter in (g, 1]."""

    alpha: Exact
    values: tuple[Exact, ...]  # z_0 = alpha, z_1, ... out to the horizon
    digits: tuple[int, ...]  # digits[i] is the (i+1)-th digit of alpha
    horizon: int  # conditions certified for all n once checked below this
    absorbed_at: Optional[int]
    cycle: Optional[tuple[int, int]]  # (entry, period)
    budget_hit: bool
    # first n >= 2 violating the two-clause condition, with its window
    violation: Optional[tuple[int, str]]
    violation_merged: Optional[tuple[int, str]]

    @property
    def decided(self) -> bool:
        return not self.budget_hit or self.violation is not None

    @property
    def is_member(self) -> bool:
        if self.violation is not None:
            return False
        if self.budget_hit:
            raise UndecidedError("budget exhausted without certificate")
        return True

    def marker_le(self, i: int) -> bool:
        """z_i <= 1 - alpha."""
        return self.values[i] <= 1 - self.alpha

    def marker_ge(self, i: int) -> bool:
        """z_i >= alpha."""
        return self.values[i] >= self.alpha

    def p_counter(self, n: int) -> int:
        """P_n: steps back to the latest threshold marker."""
        if n < 1:
            raise DomainError("P_n needs n >= 1")
        for k in range(n + 1):
            if self.marker_le(n - k) or (n - k - 1 >= 0 and self.marker_ge(n - k - 1)):
                return k
        raise AssertionError("unreachable: z_0 = alpha >= alpha")  # pragma: no cover

    def r_count(self, n: int) -> int:
        """R_n: how many of z_1 .. z_{n-1} lie at or above alpha."""
        return sum(1 for k in range(1, n) if self.marker_ge(k))


def gauss_analysis(alpha, budget: int = DEFAULT_BUDGET) -> GaussAnalysis:
    """Iterate the Gauss map on alpha with exact termination certificates.

    For rational input the orbit reaches 0 and every later term is safely
    outside the open decision windows.  For quadratic input the orbit closes
    a cycle of period p entered at s; window membership together with the
    parity of P_n is then periodic in n with period 2p once n >= s + 2p, so
    checking n < s + 4p certifies all n.
    """
    a = as_exact(alpha)
    if not _gt_golden(a) and not _is_golden(a):
        raise DomainError(f"parameter {a} is not in [g, 1]")
    if (a > 1) if isinstance(a, Fraction) else a.compare(1) > 0:
        raise DomainError(f"parameter {a} exceeds 1")

    values: list[Exact] = [a]
    digits: list[int] = []
    absorbed_at = None
    cycle = None
    budget_hit = False
    seen: dict[Exact, int] = {a: 0}
    z = a
    for n in range(1, budget + 1):
        if isinstance(z, Fraction):
            if not z:
                absorbed_at = n - 1
                break
            digits.append(z.denominator // z.numerator)
        else:
            digits.append(z.inverse().floor())
        z = _gauss_step(z)
        if z in seen:
            cycle = (seen[z], n - seen[z])
            break
        seen[z] = n
        values.append(z)
    else:
        budget_hit = True

    if absorbed_at is not None:
        horizon = absorbed_at + 1
    elif cycle is not None:
        s, p = cycle
        horizon = s + 4 * p
        while len(values) < horizon:
            values.append(values[len(values) - p])
            digits.append(digits[len(digits) - p])
    else:
        horizon = len(values)

    ana = GaussAnalysis(
        alpha=a,
        values=tuple(values),
        digits=tuple(digits),
        horizon=horizon,
        absorbed_at=absorbed_at,
        cycle=cycle,
        budget_hit=budget_hit,
        violation=None,
        violation_merged=None,
    )

    one_minus = 1 - a
    outer_lo = 1 / (a + 1) if isinstance(a, Fraction) else (a + 1).inverse()
    inner_hi = 1 - outer_lo  # alpha/(alpha+1)

    violation = None
    violation_merged = None
    for n in range(2, min(horizon, len(ana.values))):
        zn = ana.values[n]
        in_outer = outer_lo < zn < a
        in_inner = one_minus < zn < inner_hi
        if not (in_outer or in_inner):
            continue
        odd = ana.p_counter(n) % 2 == 1
        if violation is None and (in_outer or odd):
            violation = (n, "outer" if in_outer else "inner")
        if violation_merged is None and odd:
            violation_merged = (n, "outer" if in_outer else "inner")
        if violation and violation_merged:
            break

    object.__setattr__(ana, "violation", violation)
    object.__setattr__(ana, "violation_merged", violation_merged)
    if ana.decided and (violation is None) != (violation_merged is None):
        raise StateViolationError(
            "two-clause and merged Gauss conditions disagree"
        )  # pragma: no cover
    return ana


def p_counter(alpha, n: int) -> int:
    """Exact P_n along the Gauss orbit of alpha."""
    ana = gauss_analysis(alpha, budget=max(DEFAULT_BUDGET, n + 2))
    if n >= len(ana.values):
        if ana.absorbed_at is not None:
            # orbit is constant 0 from the absorption index on
            pad = list(ana.values) + [
                ana.values[ana.absorbed_at] * 0 for _ in range(n + 1 - len(ana.values))
            ]
            ana = GaussAnalysis(
                ana.alpha, tuple(pad), ana.digits, ana.horizon,
                ana.absorbed_at, ana.cycle, ana.budget_hit,
                ana.violation, ana.violation_merged,
            )
        else:
            raise DomainError(f"orbit data shorter than n = {n}")
    return ana.p_counter(n)


# ---------------------------------------------------------------------------
# Pair state machine
# ---------------------------------------------------------------------------


class PairState(enum.Enum):
    A = "A"  # (x+1)(y+1) = 1
    B = "B"  # x + y = 0
    C = "C"  # x + y = 1


@dataclass(frozen=True)
class PairTrace:
    states: tuple[PairState, ...]
    exceedance: Optional[tuple[int, int]]  # (m, epsilon)
    termination: str  # exceeded | absorbed | cycle | budget
    points: tuple[tuple[Exact, Exact], ...]


def _classify_pair(x: Exact, y: Exact) -> PairState:
    s = x + y
    if s == 0:
        return PairState.B
    if s == 1:
        return PairState.C
    if (x + 1) * (y + 1) == 1:
        return PairState.A
    raise StateViolationError(f"no pair relation holds at ({x}, {y})")


_PAIR_TRANSITIONS = {
    PairState.A: {PairState.B, PairState.C},
    PairState.B: {PairState.B, PairState.C},
    PairState.C: {PairState.A},
}


def pair_trace(alpha, n_max: int = DEFAULT_BUDGET) -> PairTrace:
    """States of (T^n(alpha-1), T^n(1/alpha - 1)) until one orbit exceeds
    1/(alpha+1); epsilon is +1 when the alpha-1 orbit exceeded, -1 for the
    other one.  Exceedance always lands with the two orbits summing to 1.
    """
    a = as_exact(alpha)
    if not (_gt_golden(a) or _is_golden(a)):
        raise DomainError("pair tracing needs alpha in [g, 1]")
    one = Fraction(1)
    x: Exact = a - 1
    y: Exact = (1 / a if isinstance(a, Fraction) else a.inverse()) - 1
    threshold = 1 / (a + 1) if isinstance(a, Fraction) else (a + 1).inverse()

    states: list[PairState] = []
    points: list[tuple[Exact, Exact]] = []
    seen: dict[tuple[Exact, Exact], int] = {}
    for n in range(n_max + 1):
        points.append((x, y))
        x_over = x > threshold
        y_over = y > threshold
        if x_over or y_over:
            if x + y != one:
                raise StateViolationError(
                    f"exceedance at n={n} without x+y=1 for alpha={a}"
                )
            states.append(PairState.C)
            eps = 1 if x_over else -1
            return PairTrace(tuple(states), (n, eps), "exceeded", tuple(points))
        if x == 0 and y == 0:
            # the absorbed pair satisfies several relations at once; the
            # transition diagram describes the dynamics before absorption
            return PairTrace(tuple(states), None, "absorbed", tuple(points))
        if (x == 0) != (y == 0):
            raise StateViolationError(
                f"one-sided absorption below threshold at n={n}, alpha={a}"
            )
        st = _classify_pair(x, y)
        if states and st not in _PAIR_TRANSITIONS[states[-1]]:
            raise StateViolationError(
                f"transition {states[-1]}->{st} at n={n}, alpha={a}"
            )
        states.append(st)
        key = (x, y)
        if key in seen:
            return PairTrace(tuple(states), None, "cycle", tuple(points))
        seen[key] = n
        x = _ti_step(a, x)
        y = _ti_step(a, y)
    return PairTrace(tuple(states), None, "budget", tuple(points))


@dataclass(frozen=True)
class MatchVerdict:
    outcome: str  # matched | bifurcation | undecided
    M: Optional[int] = None
    N: Optional[int] = None
    m: Optional[int] = None
    epsilon: Optional[int] = None
    termination: Optional[str] = None
    reflected: bool = False
    boundary: bool = False
    trace: tuple[PairState, ...] = ()

    @property
    def index(self) -> Optional[int]:
        if self.M is None:
            return None
        return self.M - self.N


def verify_matching_identity(alpha, M: int, N: int) -> bool:
    """Exact check of T^M(alpha-1) = T^N(alpha)."""
    a = as_exact(alpha)
    u: Exact = a - 1
    for _ in range(M):
        u = _ti_step(a, u)
    v: Exact = a
    for _ in range(N):
        v = _ti_step(a, v)
    return u == v


def match_by_definition(alpha, budget: int = 200) -> Optional[tuple[int, int]]:
    """First exponent pair (M, N), |M-N| in {0, 2}, with the orbit identity.

    Direct search from the definition; used where the state machinery does
    not apply (the central parameter range).  Returns None when both orbits
    close cycles without a coincidence or the budget runs out.
    """
    a = as_exact(alpha)
    us: list[Exact] = [a - 1]
    vs: list[Exact] = [a]
    for t in range(1, budget + 1):
        us.append(_ti_step(a, us[-1]))
        vs.append(_ti_step(a, vs[-1]))
        for M, N in ((t, t), (t, t - 2), (t - 2, t)):
            if M < 0 or N < 0:
                continue
            if us[M] == vs[N]:
                return M, N
    return None


# ---------------------------------------------------------------------------
# Central range: three known adjacent intervals between 1-g and g
# ---------------------------------------------------------------------------

_CENTRAL_CACHE: list = []


def central_intervals() -> tuple["MatchingInterval", ...]:
    """The three adjacent matching intervals tiling (1-g, g).

    The middle interval is symmetric about 1/2; the left one is the
    reflection of the right one.  Exponents are measured at two interior
    samples by direct orbit search and must agree.
    """
    if _CENTRAL_CACHE:
        return tuple(_CENTRAL_CACHE)
    w2 = rcf_eval(RcfExpansion((), (2,)))       # sqrt(2) - 1
    w3 = rcf_eval(RcfExpansion((1, 1), (2,)))   # 2 - sqrt(2)
    w4 = GOLDEN
    made = []
    for left, right in ((w2, w3), (w3, w4)):
        pc = simplest_rational_between(left, right)
        exps = set()
        for a, b in ((left, pc), (pc, right)):
            s = simplest_rational_between(a, b)
            exps.add(match_by_definition(s))
        if len(exps) != 1 or None in exps:
            raise StateViolationError("central samples disagree on exponents")
        M, N = exps.pop()
        made.append(
            MatchingInterval(
                left=left,
                right=right,
                left_expansion=rcf_expand(left),
                right_expansion=rcf_expand(right),
                M=M,
                N=N,
                pseudocenter=pc,
                case="central",
                n=0,
            )
        )
    middle, right_iv = made
    left_iv = reflect_interval(right_iv)
    _CENTRAL_CACHE.extend([left_iv, middle, right_iv])
    return tuple(_CENTRAL_CACHE)


def detect_matching(alpha, n_max: int = DEFAULT_BUDGET) -> MatchVerdict:
    """Full matching verdict for an exact parameter anywhere in [0, 1].

    Above g the exceedance machinery decides; below 1/2 the problem is
    reflected through alpha -> 1-alpha (exponents swap, index negates);
    between 1/2 and g the verdict comes from the three known central
    intervals, with the orbit identity re-verified at alpha itself.
    """
    a = as_exact(alpha)
    neg = a < 0 if isinstance(a, Fraction) else a.sign() < 0
    over = a > 1 if isinstance(a, Fraction) else a.compare(1) > 0
    if neg or over:
        raise DomainError(f"parameter {a} outside [0, 1]")

    if isinstance(a, Fraction) and a < Fraction(1, 2) or (
        isinstance(a, QuadraticNumber) and a.compare(Fraction(1, 2)) < 0
    ):
        v = detect_matching(1 - a, n_max)
        return MatchVerdict(
            outcome=v.outcome,
            M=v.N,
            N=v.M,
            m=v.m,
            epsilon=v.epsilon,
            termination=v.termination,
            reflected=True,
            boundary=v.boundary,
            trace=v.trace,
        )

    if _is_golden(a):
        t = pair_trace(a, n_max)
        return MatchVerdict(
            outcome="bifurcation", termination=t.termination,
            boundary=True, trace=t.states,
        )

    if not _gt_golden(a):  # central range [1/2, g)
        for iv in central_intervals():
            if iv.left == a or iv.right == a:
                return MatchVerdict(outcome="bifurcation", boundary=True,
                                    termination="endpoint")
            if iv.left < a < iv.right:
                if not verify_matching_identity(a, iv.M, iv.N):
                    raise StateViolationError(
                        f"identity fails inside central interval at {a}"
                    )
                return MatchVerdict(outcome="matched", M=iv.M, N=iv.N,
                                    termination="central")
        raise StateViolationError(f"{a} escaped the central tiling")

    t = pair_trace(a, n_max)
    if t.exceedance is not None:
        m, eps = t.exceedance
        M = m + 2 - (1 - eps) // 2
        N = m + 2 + (1 - eps) // 2
        if not verify_matching_identity(a, M, N):
            raise StateViolationError(f"matching identity failed at {a}")
        return MatchVerdict(outcome="matched", M=M, N=N, m=m, epsilon=eps,
                            termination=t.termination, trace=t.states)
    if t.termination in ("absorbed", "cycle"):
        return MatchVerdict(outcome="bifurcation", termination=t.termination,
                            trace=t.states)
    return MatchVerdict(outcome="undecided", termination="budget",
                        trace=t.states)


# ---------------------------------------------------------------------------
# Triple state machine
# ---------------------------------------------------------------------------


class TripleTag(enum.Enum):
    A = "A~"
    B0 = "B~0"
    B1 = "B~1"
    C = "C~"


@dataclass(frozen=True)
class TripleState:
    tag: TripleTag
    x: Exact
    y: Exact
    z: Exact
    r: int
    n: int

    @property
    def gauss_index(self) -> int:
        return self.n + self.r + 1


@dataclass(frozen=True)
class TripleTrace:
    states: tuple[TripleState, ...]
    critical: Optional[int]  # index into states of the first critical C~
    termination: str  # critical | absorbed | cycle | budget


def triple_trace(alpha, n_max: int = DEFAULT_BUDGET) -> TripleTrace:
    """Trace of the swap-counting triple machine for alpha in (g, 1].

    Every step asserts that exactly one state relation holds, that the
    third coordinate tracks the Gauss orbit of alpha at index n + r + 1,
    and that each r increment matches one threshold crossing of that orbit.
    Stops at the first critical C~ state (whose Gauss index has odd P).
    """
    a = as_exact(alpha)
    if not _gt_golden(a):
        raise DomainError("triple tracing needs alpha in (g, 1]")
    inv_a = (1 / a) if isinstance(a, Fraction) else a.inverse()
    x: Exact = inv_a - 1
    y: Exact = a - 1
    z: Exact = inv_a - 1
    r = 0
    outer_lo = 1 / (a + 1) if isinstance(a, Fraction) else (a + 1).inverse()
    inner_hi = 1 - outer_lo
    one_minus = 1 - a
    half = Fraction(1, 2)

    # independent Gauss orbit for the cross-checks
    gz: list[Exact] = [a]

    def gauss_upto(k: int):
        while len(gz) <= k:
            zz = gz[-1]
            gz.append(zz if zz == 0 else _gauss_step(zz))

    states: list[TripleState] = []
    seen: dict[tuple, int] = {}
    for n in range(n_max + 1):
        if x == 0 and y == 0 and z == 0:
            return TripleTrace(tuple(states), None, "absorbed")
        matches = []
        if z == x and (x + 1) * (y + 1) == 1:
            matches.append(TripleTag.A)
        if z == x and x + y == 0:
            matches.append(TripleTag.B0)
        if z == 1 + x and x + y == 0:
            matches.append(TripleTag.B1)
        if z == x and x + y == 1:
            matches.append(TripleTag.C)
        if len(matches) != 1:
            raise StateViolationError(
                f"{len(matches)} state relations hold at n={n} for alpha={a}"
            )
        tag = matches[0]
        gauss_upto(n + r + 1)
        if gz[n + r + 1] != z:
            raise StateViolationError(
                f"third coordinate left the Gauss orbit at n={n}"
            )
        states.append(TripleState(tag, x, y, z, r, n))
        if tag is TripleTag.C and (z < inner_hi or z > outer_lo):
            if not (one_minus < z < a):
                raise StateViolationError("critical C~ outside (1-alpha, alpha)")
            return TripleTrace(tuple(states), len(states) - 1, "critical")
        key = (x, y, z)
        if key in seen:
            return TripleTrace(tuple(states), None, "cycle")
        seen[key] = n
        inc = 1 if (
            tag is TripleTag.B1
            or (tag is TripleTag.C and half < z <= outer_lo)
        ) else 0
        gauss_upto(n + r + inc + 2)
        crossings = sum(
            1 for k in range(n + r + 1, n + r + inc + 2) if gz[k] >= a
        )
        if crossings != inc:
            raise StateViolationError(
                f"r increment {inc} but {crossings} Gauss crossings at n={n}"
            )
        if inc:
            x, y = _ti_step(a, y), _ti_step(a, x)
            z = _gauss_step(_gauss_step(z))
        else:
            x, y = _ti_step(a, x), _ti_step(a, y)
            z = _gauss_step(z)
        r += inc
    return TripleTrace(tuple(states), None, "budget")


# ---------------------------------------------------------------------------
# Matching intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatchingInterval:
    left: QuadraticNumber
    right: QuadraticNumber
    left_expansion: RcfExpansion
    right_expansion: RcfExpansion
    M: int
    N: int
    pseudocenter: Fraction
    case: str  # inner | outer | central
    n: int  # minimal Gauss index of the construction (0 for central)

    @property
    def index(self) -> int:
        return self.M - self.N

    def contains(self, value) -> bool:
        v = as_exact(value)
        return self.left < v < self.right

    def length(self) -> float:
        return float(self.right) - float(self.left)


def interval_from_alpha(alpha, budget: int = DEFAULT_BUDGET,
                        _analysis: Optional[GaussAnalysis] = None) -> MatchingInterval:
    """Construct the matching interval containing alpha in (g, 1] \\ E.

    Finds the minimal n >= 2 whose Gauss iterate falls in one of the two
    decision windows (the inner one only counts when P_n is odd), then reads
    endpoints, exponents and pseudocenter off the first n digits of alpha.
    """
    ana = _analysis if _analysis is not None else gauss_analysis(alpha, budget)
    a = ana.alpha
    if not _gt_golden(a):
        raise DomainError("interval construction needs alpha in (g, 1]")
    if ana.violation is None:
        if not ana.decided:
            raise UndecidedError("no qualifying n within budget")
        raise NotInMatchingIntervalError(f"{a} is in the bifurcation set")
    n, case = ana.violation
    dig = ana.digits
    if dig[0] != 1:
        raise StateViolationError("alpha > g must have leading digit 1")
    a2_an = list(dig[1:n])  # digits a_2 .. a_n
    L = 1
    while L < n and dig[L] == 1:
        L += 1
    if L >= n:  # pragma: no cover - excluded since alpha > g forces L < n
        raise StateViolationError("digit run reached the window index")
    if case == "inner":
        e1 = RcfExpansion((1,), tuple(a2_an) + (2,))
        e2 = RcfExpansion((1, dig[1]), tuple(a2_an[1:]) + (dig[1] + 1,))
        pc_digits = [1, *a2_an, 2, *dig[1:L], 1]
    else:
        e1 = RcfExpansion((), (1, *a2_an))
        e2 = RcfExpansion((), (1, *a2_an, 1))
        pc_digits = [1, *a2_an, 1, *dig[1:L], 2]
    v1, v2 = rcf_eval(e1), rcf_eval(e2)
    if v1.compare(v2) < 0:
        left, right, left_e, right_e = v1, v2, e1, e2
    else:
        left, right, left_e, right_e = v2, v1, e2, e1
    pc = rcf_eval(RcfExpansion(pc_digits, ())).as_fraction()

    rn = ana.r_count(n)
    sgn = ana.values[n] - Fraction(1, 2)
    positive = (sgn > 0) if isinstance(sgn, Fraction) else sgn.sign() > 0
    if rn % 2 == 1:
        positive = not positive
    if positive:
        M, N = n - rn, n - rn + 2
    else:
        M = N = n - rn + 1

    iv = MatchingInterval(left, right, left_e, right_e, M, N, pc, case, n)
    if not (iv.left < pc < iv.right):
        raise StateViolationError(f"pseudocenter {pc} outside ({left}, {right})")
    if not iv.contains(a):
        raise StateViolationError(f"constructed interval misses alpha = {a}")
    return iv


def reflect_interval(iv: MatchingInterval) -> MatchingInterval:
    """The mirror interval under alpha -> 1 - alpha (index negates)."""
    left = 1 - iv.right
    right = 1 - iv.left
    return MatchingInterval(
        left=left,
        right=right,
        left_expansion=rcf_expand(left),
        right_expansion=rcf_expand(right),
        M=iv.N,
        N=iv.M,
        pseudocenter=1 - iv.pseudocenter,
        case=iv.case,
        n=iv.n,
    )


def interval_samples(iv: MatchingInterval, extra: int = 0) -> list[Fraction]:
    """Three interior rationals: pseudocenter plus one to each side."""
    out = [iv.pseudocenter]
    lo_side = simplest_rational_between(iv.left, iv.pseudocenter)
    hi_side = simplest_rational_between(iv.pseudocenter, iv.right)
    out = [lo_side, iv.pseudocenter, hi_side]
    for _ in range(extra):
        lo_side = simplest_rational_between(iv.left, lo_side)
        hi_side = simplest_rational_between(hi_side, iv.right)
        out += [lo_side, hi_side]
    return out


def interval_to_json(iv: MatchingInterval) -> dict:
    return {
        "left_exact": iv.left.exact_str(),
        "left_float": float(iv.left),
        "right_exact": iv.right.exact_str(),
        "right_float": float(iv.right),
        "left_expansion": str(iv.left_expansion),
        "right_expansion": str(iv.right_expansion),
        "M": iv.M,
        "N": iv.N,
        "index": iv.index,
        "pseudocenter": f"{iv.pseudocenter.numerator}/{iv.pseudocenter.denominator}",
        "case": iv.case,
        "n": iv.n,
    }


def interval_from_json(d: dict) -> MatchingInterval:
    from .exactnum import parse_value

    pc_n, pc_d = d["pseudocenter"].split("/")
    return MatchingInterval(
        left=parse_value(d["left_exact"]),
        right=parse_value(d["right_exact"]),
        left_expansion=RcfExpansion.parse(d["left_expansion"]),
        right_expansion=RcfExpansion.parse(d["right_expansion"]),
        M=d["M"],
        N=d["N"],
        pseudocenter=Fraction(int(pc_n), int(pc_d)),
        case=d["case"],
        n=d["n"],
    )


# ---------------------------------------------------------------------------
# Exhaustive range scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanResult:
    intervals: tuple[MatchingInterval, ...]
    members: tuple[Fraction, ...]  # rationals found to lie in the bifurcation set
    lo: QuadraticNumber
    hi: QuadraticNumber
    max_den: int

    def gaps(self) -> list[tuple[QuadraticNumber, QuadraticNumber]]:
        """Closed complement segments of the scanned intervals within [lo, hi]."""
        out = []
        cur = self.lo
        for iv in self.intervals:
            if cur.compare(iv.left) <= 0:
                out.append((cur, iv.left))
            if cur.compare(iv.right) < 0:
                cur = iv.right
        if cur.compare(self.hi) <= 0:
            out.append((cur, self.hi))
        return out

    def point_in_gap(self, value) -> bool:
        """Exact check that value is not interior to any scanned interval."""
        v = value if isinstance(value, QuadraticNumber) else \
            QuadraticNumber.from_rational(value)
        for iv in self.intervals:
            if iv.left.compare(v) < 0 and iv.right.compare(v) > 0:
                return False
        return True


class _IntervalIndex:
    """Sorted-by-pseudocenter interval store with exact containment lookup."""

    def __init__(self):
        self.pcs: list[Fraction] = []
        self.ivs: list[MatchingInterval] = []

    def covers(self, r: Fraction) -> bool:
        i = bisect_left(self.pcs, r)
        for j in (i - 1, i):
            if 0 <= j < len(self.ivs):
                iv = self.ivs[j]
                if iv.left < r < iv.right:
                    return True
        return False

    def add(self, iv: MatchingInterval) -> bool:
        i = bisect_left(self.pcs, iv.pseudocenter)
        if i < len(self.pcs) and self.pcs[i] == iv.pseudocenter:
            return False
        self.pcs.insert(i, iv.pseudocenter)
        self.ivs.insert(i, iv)
        return True


def _candidates(qlo: Exact, qhi: Exact, max_den: int):
    """Reduced rationals in [qlo, qhi] by increasing denominator."""
    glo = QuadraticNumber._coerce(qlo)
    ghi = QuadraticNumber._coerce(qhi)
    for q in range(1, max_den + 1):
        lo_scaled = glo * q
        hi_scaled = ghi * q
        p_lo = lo_scaled.floor()
        if QuadraticNumber.from_rational(p_lo) != lo_scaled:
            p_lo += 1
        p_hi = hi_scaled.floor()
        for p in range(p_lo, p_hi + 1):
            if gcd(p, q) == 1:
                yield Fraction(p, q)


def _scan_block(args):
    qlo_s, qhi_s, q_from, q_to, warm, budget = args
    from .exactnum import parse_value

    qlo = parse_value(qlo_s)
    qhi = parse_value(qhi_s)
    index = _IntervalIndex()
    for iv in warm:
        index.add(iv)
    new: list[MatchingInterval] = []
    members: list[Fraction] = []
    for q in range(q_from, q_to + 1):
        for r in _candidates_q(qlo, qhi, q):
            if index.covers(r):
                continue
            ana = gauss_analysis(r, budget)
            if ana.is_member:
                members.append(r)
                continue
            iv = interval_from_alpha(r, budget, _analysis=ana)
            if index.add(iv):
                new.append(iv)
    return new, members


def _candidates_q(qlo, qhi, q: int):
    glo = QuadraticNumber._coerce(qlo)
    ghi = QuadraticNumber._coerce(qhi)
    lo_scaled = glo * q
    hi_scaled = ghi * q
    p_lo = lo_scaled.floor()
    if QuadraticNumber.from_rational(p_lo) != lo_scaled:
        p_lo += 1
    p_hi = hi_scaled.floor()
    for p in range(p_lo, p_hi + 1):
        if gcd(p, q) == 1:
            yield Fraction(p, q)


def scan_intervals(lo, hi, max_den: int, threads: int = 1,
                   budget: int = DEFAULT_BUDGET) -> ScanResult:
    """All matching intervals hit by a rational of denominator <= max_den.

    Candidates are classified in increasing-denominator order; a candidate
    interior to an already-found interval is skipped, so each interval is
    constructed once, when its pseudocenter (the least-denominator rational
    it contains) is reached.  Output is sorted, deduplicated and disjoint.
    """
    qlo = QuadraticNumber._coerce(as_exact_qn(lo))
    qhi = QuadraticNumber._coerce(as_exact_qn(hi))
    if qlo.compare(GOLDEN) < 0 or qhi.compare(1) > 0 or qlo.compare(qhi) > 0:
        raise DomainError("scan range must satisfy g <= lo <= hi <= 1")

    index = _IntervalIndex()
    members: list[Fraction] = []

    if threads <= 1 or max_den <= 64:
        for r in _candidates(qlo, qhi, max_den):
            if index.covers(r):
                continue
            ana = gauss_analysis(r, budget)
            if ana.is_member:
                members.append(r)
                continue
            iv = interval_from_alpha(r, budget, _analysis=ana)
            index.add(iv)
    else:
        import concurrent.futures as cf

        warm_den = min(64, max_den)
        for r in _candidates(qlo, qhi, warm_den):
            if index.covers(r):
                continue
            ana = gauss_analysis(r, budget)
            if ana.is_member:
                members.append(r)
                continue
            index.add(interval_from_alpha(r, budget, _analysis=ana))
        warm = list(index.ivs)
        qs = list(range(warm_den + 1, max_den + 1))
        blocks = []
        step = max(1, len(qs) // (threads * 4))
        for i in range(0, len(qs), step):
            blocks.append(
                (qlo.exact_str(), qhi.exact_str(), qs[i], qs[min(i + step, len(qs)) - 1],
                 warm, budget)
            )
        with cf.ProcessPoolExecutor(max_workers=threads) as ex:
            for new, mem in ex.map(_scan_block, blocks):
                for iv in new:
                    index.add(iv)
                members.extend(mem)

    members = sorted(set(members))
    ivs = tuple(index.ivs)
    for a, b in zip(ivs, ivs[1:]):
        if a.right.compare(b.left) > 0:
            raise StateViolationError(
                f"scanned intervals overlap near {a.pseudocenter}"
            )
    return ScanResult(ivs, tuple(members), qlo, qhi, max_den)


def as_exact_qn(x) -> QuadraticNumber:
    v = as_exact(x)
    return QuadraticNumber.from_rational(v) if isinstance(v, Fraction) else v
