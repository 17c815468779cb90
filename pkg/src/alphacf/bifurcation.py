"""Membership in the bifurcation set, decided three independent ways.

The bifurcation set on [g, 1] (the parameters whose own two critical
orbits never exceed 1/(alpha+1)) has three equivalent characterizations:
through the parameter's own map, through the fixed map at parameter g, and
through the classical Gauss map with a parity side condition.  Each
procedure here terminates with a certificate for exact input: rational
orbits reach 0 by strict denominator descent, quadratic orbits close an
exact cycle.  A verdict of Yes is only ever produced with a certificate.

The module also hosts the constructive generators of known members:
the (n-1)/n family, digit-tail extensions around a rational member, the
near-g embeddings of digit-constrained expansions, and the separator
triples between adjacent interval pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Union

from .errors import (
    DomainError,
    InternalDisagreementError,
    PreconditionError,
    StateViolationError,
    UnsupportedFieldError,
)
from .exactnum import (
    GOLDEN,
    QuadraticNumber,
    RcfExpansion,
    rcf_eval,
    rcf_expand,
    simplest_rational_between,
)
from .matching import (
    MatchingInterval,
    as_exact,
    gauss_analysis,
    interval_from_alpha,
    pair_trace,
)

__all__ = [
    "MembershipVerdict",
    "in_E_via_talpha",
    "in_E_via_tg",
    "in_E_via_gauss",
    "membership",
    "membership_interval",
    "gen_rational_members",
    "extend_member",
    "high_type",
    "no_ones_run",
    "aligned_no_ones",
    "digit_predicate",
    "embed_near_golden",
    "separator_family",
    "SeparatorTriple",
]

Exact = Union[Fraction, QuadraticNumber]

DEFAULT_BUDGET = 10_000

# (isqrt-free) exact test for fractional part > (sqrt(5)-1)/2
def _frac_gt_golden(num: int, den: int) -> bool:
    t = 2 * num + den
    return t > 0 and t * t > 5 * den * den


@dataclass(frozen=True)
class MembershipVerdict:
    member: str  # yes | no | undecided
    method: str  # talpha | tg | gauss | interval
    witness: Optional[dict] = None
    termination: str = ""  # absorbed | cycle | budget | ambiguous
    boundary: bool = False

    def __bool__(self):
        return self.member == "yes"


def _domain_check(a: Exact):
    if isinstance(a, Fraction):
        below = _frac_gt_golden(a.numerator, a.denominator) is False
        if below or a > 1:
            raise DomainError(f"membership tests cover [g, 1]; got {a}")
    else:
        if a.compare(GOLDEN) < 0 or a.compare(1) > 0:
            raise DomainError(f"membership tests cover [g, 1]; got {a}")


def _is_boundary(a: Exact) -> bool:
    return (isinstance(a, QuadraticNumber) and a == GOLDEN) or a == 1


def in_E_via_talpha(alpha, budget: int = DEFAULT_BUDGET) -> MembershipVerdict:
    """Do both critical orbits of alpha's own map stay below 1/(alpha+1)?"""
    a = as_exact(alpha)
    _domain_check(a)
    t = pair_trace(a, budget)
    if t.exceedance is not None:
        m, eps = t.exceedance
        x, y = t.points[m]
        over = x if eps == 1 else y
        return MembershipVerdict(
            member="no",
            method="talpha",
            witness={
                "n": m,
                "orbit": "alpha-1" if eps == 1 else "1/alpha-1",
                "value": str(over),
                "epsilon": eps,
            },
            termination="exceeded",
        )
    if t.termination in ("absorbed", "cycle"):
        return MembershipVerdict(
            member="yes", method="talpha", termination=t.termination,
            boundary=_is_boundary(a),
        )
    return MembershipVerdict(member="undecided", method="talpha",
                             termination="budget")


def _tg_step_rational(x: Fraction) -> Fraction:
    """One step of the parameter-g map on a rational point (stays rational)."""
    n, d = x.numerator, x.denominator
    # digit = floor(d/n + 1 - g) = floor(d/n) + [frac(d/n) > g]
    fl = d // n
    fn, fd = d - fl * n, n
    if fd < 0:
        fn, fd = -fn, -fd
    dig = fl + (1 if _frac_gt_golden(fn, fd) else 0)
    return Fraction(d - dig * n, n)


def _tg_step_field(x: QuadraticNumber) -> QuadraticNumber:
    inv = x.inverse()
    dig = (inv + 1 - GOLDEN).floor()
    return inv - dig


def in_E_via_tg(alpha, budget: int = DEFAULT_BUDGET,
                numeric_fallback: bool = True) -> MembershipVerdict:
    """Do both critical orbits under the fixed map at g stay >= alpha - 1?

    Exact for rational alpha (descent to 0) and for alpha in the golden
    field (cycle closure).  Other fields fall back to certified rational
    interval iteration, which can certify a violation but never a Yes.
    """
    a = as_exact(alpha)
    _domain_check(a)
    if isinstance(a, QuadraticNumber) and a.d not in (0, 5):
        if not numeric_fallback:
            raise UnsupportedFieldError(
                f"exact mode needs alpha in Q or Q(sqrt(5)); got sqrt({a.d})"
            )
        return _tg_interval(a, budget)

    floor_v: Exact = a - 1
    seeds: list[Exact]
    if isinstance(a, Fraction):
        seeds = [a - 1, 1 / a - 1]
    else:
        seeds = [a - 1, a.inverse() - 1]
    terminations = []
    for tag, seed in zip(("alpha-1", "1/alpha-1"), seeds):
        x = seed
        seen = {}
        n = 0
        while True:
            if n > budget:
                return MembershipVerdict(member="undecided", method="tg",
                                         termination="budget")
            if n >= 1 and x < floor_v:
                return MembershipVerdict(
                    member="no", method="tg",
                    witness={"n": n, "orbit": tag, "value": str(x)},
                    termination="exceeded",
                )
            if x == 0:
                terminations.append("absorbed")
                break
            if x in seen:
                terminations.append("cycle")
                break
            seen[x] = n
            if isinstance(x, Fraction):
                prev_den = x.denominator
                x = _tg_step_rational(x)
                if x != 0 and x.denominator >= prev_den:
                    raise StateViolationError(
                        "denominator failed to descend under the g-map"
                    )
            else:
                x = _tg_step_field(x)
            n += 1
    return MembershipVerdict(
        member="yes", method="tg",
        termination="+".join(terminations), boundary=_is_boundary(a),
    )


def _round_out(lo: Fraction, hi: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Widen [lo, hi] outward onto the dyadic grid 2**-bits (bounds sizes)."""
    scale = 1 << bits
    flo = Fraction((lo.numerator * scale) // lo.denominator, scale)
    num = hi.numerator * scale
    fhi = Fraction(-((-num) // hi.denominator), scale)
    return flo, fhi


def _tg_interval(a: QuadraticNumber, budget: int) -> MembershipVerdict:
    """Certified rational-interval iteration for foreign-field parameters."""
    for bits in (128, 256, 512):
        a_lo, a_hi = a.to_interval(bits)
        g_lo, g_hi = GOLDEN.to_interval(bits)
        verdict = _interval_orbit_tg(a_lo, a_hi, g_lo, g_hi, budget, bits)
        if verdict is not None:
            return verdict
    return MembershipVerdict(member="undecided", method="tg",
                             termination="ambiguous")


def _interval_orbit_tg(a_lo, a_hi, g_lo, g_hi, budget, bits) -> Optional[MembershipVerdict]:
    for tag, (s_lo, s_hi) in (
        ("alpha-1", (a_lo - 1, a_hi - 1)),
        ("1/alpha-1", (1 / a_hi - 1, 1 / a_lo - 1)),
    ):
        x_lo, x_hi = s_lo, s_hi
        for n in range(1, budget + 1):
            if x_lo <= 0 <= x_hi:
                return None  # cannot invert across zero at this precision
            inv_lo, inv_hi = 1 / x_hi, 1 / x_lo
            t_lo = inv_lo + 1 - g_hi
            t_hi = inv_hi + 1 - g_lo
            if t_lo.__floor__() != t_hi.__floor__():
                return None
            d = t_lo.__floor__()
            x_lo, x_hi = _round_out(inv_lo - d, inv_hi - d, bits)
            if x_hi < a_lo - 1:
                return MembershipVerdict(
                    member="no", method="tg",
                    witness={"n": n, "orbit": tag,
                             "value": f"[{float(x_lo)}, {float(x_hi)}]"},
                    termination="exceeded",
                )
    return MembershipVerdict(member="undecided", method="tg",
                             termination="budget")


def in_E_via_gauss(alpha, budget: int = DEFAULT_BUDGET) -> MembershipVerdict:
    """Gauss-orbit characterization with the odd-parity side condition."""
    a = as_exact(alpha)
    _domain_check(a)
    ana = gauss_analysis(a, budget)
    if ana.violation is not None:
        n, window = ana.violation
        return MembershipVerdict(
            member="no", method="gauss",
            witness={"n": n, "window": window, "value": str(ana.values[n]),
                     "p_odd": ana.p_counter(n) % 2 == 1},
            termination="exceeded",
        )
    if not ana.decided:
        return MembershipVerdict(member="undecided", method="gauss",
                                 termination="budget")
    term = "absorbed" if ana.absorbed_at is not None else "cycle"
    return MembershipVerdict(member="yes", method="gauss", termination=term,
                             boundary=_is_boundary(a))


_METHODS = {
    "talpha": in_E_via_talpha,
    "tg": in_E_via_tg,
    "gauss": in_E_via_gauss,
}


def membership(alpha, method: str = "all",
               budget: int = DEFAULT_BUDGET) -> dict[str, MembershipVerdict]:
    """Run one or all membership procedures; 'all' asserts agreement."""
    if method != "all":
        return {method: _METHODS[method](alpha, budget)}
    out = {name: fn(alpha, budget) for name, fn in _METHODS.items()}
    decided = {v.member for v in out.values() if v.member != "undecided"}
    if len(decided) > 1:
        raise InternalDisagreementError(
            f"membership procedures disagree at {alpha}: "
            + ", ".join(f"{k}={v.member}" for k, v in out.items())
        )
    return out


def membership_interval(lo: Fraction, hi: Fraction,
                        budget: int = 500) -> MembershipVerdict:
    """Membership over a whole interval of parameters, by outward iteration.

    Used for inexact (decimal) input.  Both critical orbits advance in
    lockstep with the parameter carried as an interval; any straddled digit
    floor or threshold gives Undecided.  Only a violation (exceedance
    certified for every parameter in the interval) can be decided, and its
    joint-first step and side are reported so matching exponents follow.
    """
    if not (Fraction(1, 2) < lo <= hi <= 1):
        raise DomainError("interval membership expects [lo, hi] inside (1/2, 1]")
    thr_lo, thr_hi = 1 / (hi + 1), 1 / (lo + 1)

    def step(x_lo: Fraction, x_hi: Fraction):
        if x_lo <= 0 <= x_hi:
            return None
        inv_lo, inv_hi = 1 / x_hi, 1 / x_lo
        t_lo, t_hi = inv_lo + 1 - hi, inv_hi + 1 - lo
        if t_lo.__floor__() != t_hi.__floor__():
            return None
        d = t_lo.__floor__()
        return _round_out(inv_lo - d, inv_hi - d, 256)

    x = (lo - 1, hi - 1)
    y = (1 / hi - 1, 1 / lo - 1)
    for n in range(budget):
        for tag, eps, (v_lo, v_hi) in (("alpha-1", 1, x), ("1/alpha-1", -1, y)):
            if v_lo > thr_hi:
                return MembershipVerdict(
                    member="no", method="interval",
                    witness={"n": n, "orbit": tag, "epsilon": eps,
                             "value": f"[{float(v_lo)}, {float(v_hi)}]"},
                    termination="exceeded",
                )
            if v_hi > thr_lo:
                return MembershipVerdict(member="undecided", method="interval",
                                         termination="ambiguous")
        nx, ny = step(*x), step(*y)
        if nx is None or ny is None:
            return MembershipVerdict(member="undecided", method="interval",
                                     termination="ambiguous")
        x, y = nx, ny
    return MembershipVerdict(member="undecided", method="interval",
                             termination="budget")


# ---------------------------------------------------------------------------
# Generators of known members
# ---------------------------------------------------------------------------


def gen_rational_members(n_max: int) -> list[Fraction]:
    """The members (n-1)/n for 3 <= n <= n_max, re-verified three ways."""
    if n_max < 3:
        raise DomainError("need n_max >= 3")
    out = []
    for n in range(3, n_max + 1):
        r = Fraction(n - 1, n)
        verdicts = membership(r, "all")
        if not all(v.member == "yes" for v in verdicts.values()):
            raise InternalDisagreementError(f"{r} rejected by a membership test")
        out.append(r)
    return out


def extend_member(alpha0, tail: tuple[int, ...] = (),
                  periodic: bool = False) -> Exact:
    """Member with expansion [0;1,a2..ak,c,tail...] built around a member.

    c is max(a2..ak) + 2 and every tail digit must be >= a2 + 2; a finite
    tail gives a rational member, a periodic tail a quadratic one.  The
    output is re-verified before it is returned.
    """
    a0 = as_exact(alpha0)
    if not isinstance(a0, Fraction):
        raise PreconditionError("base point must be rational")
    if not (_frac_gt_golden(a0.numerator, a0.denominator) and a0 < 1):
        raise PreconditionError(f"base point {a0} outside (g, 1)")
    if not in_E_via_gauss(a0):
        raise PreconditionError(f"base point {a0} is not a member")
    digits = rcf_expand(a0).preperiod
    if digits[0] != 1 or len(digits) < 2:
        raise PreconditionError(f"unexpected expansion {digits} for {a0}")
    a2 = digits[1]
    c = max(digits[1:]) + 2
    if any(t < a2 + 2 for t in tail):
        raise PreconditionError(f"tail digits must all be >= {a2 + 2}")
    if periodic and not tail:
        raise PreconditionError("periodic extension needs a nonempty tail")
    if periodic:
        e = RcfExpansion(digits + (c,), tail)
        value: Exact = rcf_eval(e)
    else:
        value = rcf_eval(RcfExpansion(digits + (c,) + tuple(tail), ())).as_fraction()
    if not in_E_via_gauss(value):
        raise StateViolationError(f"extension {value} failed the membership check")
    return value


# ---------------------------------------------------------------------------
# Digit-constraint predicates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DigitConstraint:
    kind: str  # high-type | no-ones-run | aligned-no-ones
    n: int


def high_type(n: int) -> DigitConstraint:
    """All digits >= n."""
    return DigitConstraint("high-type", n)


def no_ones_run(n: int) -> DigitConstraint:
    """No n consecutive digits equal to 1, at any offset."""
    return DigitConstraint("no-ones-run", n)


def aligned_no_ones(n: int) -> DigitConstraint:
    """No all-ones block of length n starting at positions 1, n+1, 2n+1, ..."""
    return DigitConstraint("aligned-no-ones", n)


def _digit_prefix(e: RcfExpansion, count: int) -> tuple[int, ...]:
    return e.digits(count)


def digit_predicate(constraint: DigitConstraint, e: RcfExpansion) -> bool:
    """Evaluate a shift-window digit condition on the full digit stream.

    For an eventually periodic stream every window content appears within
    the preperiod plus one period (plus window overhang), and every aligned
    block residue within lcm(n, period); finite streams are checked whole.
    """
    n = constraint.n
    pre, per = len(e.preperiod), len(e.period)
    if constraint.kind == "high-type":
        cover = pre + per
        return all(d >= n for d in _digit_prefix(e, cover))
    if constraint.kind == "no-ones-run":
        if e.is_finite:
            digits = e.preperiod
        else:
            digits = _digit_prefix(e, pre + per + n - 1)
        run = 0
        for d in digits:
            run = run + 1 if d == 1 else 0
            if run >= n:
                return False
        return True
    if constraint.kind == "aligned-no-ones":
        if e.is_finite:
            digits = e.preperiod
            full = len(digits) // n
        else:
            cover = pre + lcm(n, per) + n
            digits = _digit_prefix(e, cover)
            full = (len(digits)) // n
        for k in range(full):
            block = digits[k * n:(k + 1) * n]
            if len(block) == n and all(d == 1 for d in block):
                return False
        return True
    raise DomainError(f"unknown constraint kind {constraint.kind}")


def embed_near_golden(n: int, e: RcfExpansion) -> QuadraticNumber:
    """Member of the bifurcation set from a run-constrained expansion.

    Prefixes 2n+3 ones and a 2, so the result starts with exactly 2n+3
    ones and keeps no other run of 2n+1; such parameters sit just above g
    and never match.  The membership is re-verified exactly.
    """
    if e.is_finite:
        raise PreconditionError("embedding needs an infinite (periodic) expansion")
    if not digit_predicate(no_ones_run(2 * n + 1), e):
        raise PreconditionError(f"expansion {e} violates the run constraint")
    combined = RcfExpansion((1,) * (2 * n + 3) + (2,) + e.preperiod, e.period)
    value = rcf_eval(combined)
    if value.compare(GOLDEN) <= 0:
        raise StateViolationError(f"embedded value {value} not above g")
    if not in_E_via_gauss(value):
        raise StateViolationError(f"embedded value {value} failed membership")
    return value


# ---------------------------------------------------------------------------
# Separator triples (isolated members between adjacent intervals)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparatorTriple:
    a: int
    lower: QuadraticNumber      # left endpoint of the lower interval
    separator: QuadraticNumber  # the shared endpoint; a member
    upper: QuadraticNumber      # right endpoint of the upper interval
    lower_interval: MatchingInterval
    upper_interval: MatchingInterval


def separator_family(a: int, budget: int = DEFAULT_BUDGET) -> SeparatorTriple:
    """The member separating two adjacent matching intervals, for digit a.

    Evaluates the three periodic words with digit a, checks their exact
    ordering, verifies the separator's membership, and reconstructs both
    adjacent intervals from their pseudocenters.
    """
    if a < 2:
        raise DomainError("separator family needs a >= 2")
    lower = rcf_eval(RcfExpansion((), (1, a, 1, 1, a)))
    sep = rcf_eval(RcfExpansion((), (1, a, 1)))
    upper = rcf_eval(RcfExpansion((), (1, a)))
    if not (lower.compare(sep) < 0 < upper.compare(sep)):
        raise StateViolationError("separator triple out of order")
    if not in_E_via_gauss(sep, budget):
        raise StateViolationError(f"separator {sep} is not a member")
    lo_iv = interval_from_alpha(simplest_rational_between(lower, sep), budget)
    hi_iv = interval_from_alpha(simplest_rational_between(sep, upper), budget)
    if lo_iv.left != lower or lo_iv.right != sep:
        raise StateViolationError("lower interval does not match its endpoints")
    if hi_iv.left != sep or hi_iv.right != upper:
        raise StateViolationError("upper interval does not match its endpoints")
    return SeparatorTriple(a, lower, sep, upper, lo_iv, hi_iv)
