"""Membership procedures, their agreement, and the member generators."""

import random
from fractions import Fraction
from math import gcd, lcm

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphacf.bifurcation import (
    aligned_no_ones,
    digit_predicate,
    embed_near_golden,
    extend_member,
    gen_rational_members,
    high_type,
    in_E_via_gauss,
    in_E_via_talpha,
    in_E_via_tg,
    membership,
    membership_interval,
    no_ones_run,
    separator_family,
)
from alphacf.errors import (
    DomainError,
    PreconditionError,
    UnsupportedFieldError,
)
from alphacf.exactnum import (
    GOLDEN,
    QuadraticNumber,
    RcfExpansion,
    rcf_eval,
    rcf_expand,
)
from alphacf.matching import _ti_step, as_exact

F = Fraction
g = GOLDEN


def test_known_verdicts():
    assert in_E_via_talpha(F(4, 5)).member == "yes"
    assert in_E_via_tg(F(4, 5)).member == "yes"
    assert in_E_via_gauss(F(4, 5)).member == "yes"
    assert in_E_via_gauss(F(2, 3)).member == "yes"
    assert in_E_via_talpha(F(7, 10)).member == "no"
    assert in_E_via_tg(F(7, 10)).member == "no"
    assert in_E_via_gauss(F(7, 10)).member == "no"
    for fn in (in_E_via_talpha, in_E_via_tg, in_E_via_gauss):
        v = fn(g)
        assert v.member == "yes" and v.boundary
        v = fn(F(1))
        assert v.member == "yes" and v.boundary


def test_gauss_witness_pinned():
    v = in_E_via_gauss(F(7, 10))
    assert v.witness == {"n": 2, "window": "inner", "value": "1/3", "p_odd": True}


def test_domain_rejected():
    with pytest.raises(DomainError):
        in_E_via_gauss(F(1, 2))
    with pytest.raises(DomainError):
        in_E_via_talpha(F(11, 10))


def test_three_way_agreement_small_sweep():
    # exhaustive for denominators <= 80; acceptance pushes this to 300
    from math import isqrt

    for q in range(1, 81):
        s = isqrt(5 * q * q)
        p_lo = (s - q) // 2 + 1
        for p in range(p_lo, q + 1):
            if gcd(p, q) != 1:
                continue
            r = F(p, q)
            vs = membership(r, "all")
            kinds = {v.member for v in vs.values()}
            assert len(kinds) == 1 and "undecided" not in kinds, r


def test_tg_field_modes():
    eta = rcf_eval(RcfExpansion((), (1, 2)))  # member in Q(sqrt(3))
    with pytest.raises(UnsupportedFieldError):
        in_E_via_tg(eta, numeric_fallback=False)
    assert in_E_via_tg(eta).member == "undecided"  # no false certificate
    w = rcf_eval(RcfExpansion((), (1, 2, 2)))  # non-member in Q(sqrt(85))
    assert in_E_via_tg(w).member == "no"
    # golden-field parameter runs exactly
    gamma5 = rcf_eval(RcfExpansion((), (1, 4, 1)))
    if gamma5.d == 5:
        assert in_E_via_tg(gamma5).member in ("yes", "no")


def test_symmetry_via_reflected_orbits():
    # alpha in E intersect [g,1] iff the reflected parameter passes the
    # mirrored orbit conditions, via the exact conjugation of the maps
    rng = random.Random(11)
    checked = 0
    while checked < 25:
        q = rng.randrange(3, 60)
        p = rng.randrange(2 * q // 3, q + 1)
        if gcd(p, q) != 1 or (2 * p + q) ** 2 <= 5 * q * q or p > q:
            continue
        alpha = F(p, q)
        checked += 1
        direct = in_E_via_talpha(alpha).member
        # reflected parameter and seeds
        beta = 1 - alpha  # in [0, 1-g]
        seeds = (beta, -beta / (1 - beta))  # tau of alpha-1 and of 1/alpha-1
        bound = -1 / (2 - beta)  # tau of 1/(alpha+1)
        ok = True
        for s in seeds:
            x = s
            for n in range(1, 200):
                x = _ti_step(beta, x)
                if x < bound:
                    ok = False
                    break
                if x == 0:
                    break
        assert (direct == "yes") == ok, alpha


def test_gen_rational_members():
    assert gen_rational_members(5) == [F(2, 3), F(3, 4), F(4, 5)]
    assert gen_rational_members(3) == [F(2, 3)]
    with pytest.raises(DomainError):
        gen_rational_members(2)


def test_extend_member():
    assert extend_member(F(2, 3)) == F(9, 13)
    v = extend_member(F(2, 3), (4,), periodic=True)
    assert isinstance(v, QuadraticNumber) and not v.is_rational
    assert in_E_via_gauss(v).member == "yes"
    assert extend_member(F(2, 3), (5,)) != extend_member(F(2, 3), (4,))
    with pytest.raises(PreconditionError):
        extend_member(F(2, 3), (3,))  # tail digit below a2 + 2
    with pytest.raises(PreconditionError):
        extend_member(F(7, 10))  # not a member


def test_extend_member_tail_constant_is_proof_constant():
    # the inserted digit is max(a2..ak) + 2
    base = F(13, 18)  # not a member; guard
    assert in_E_via_gauss(F(2, 3)).member == "yes"
    e = rcf_expand(extend_member(F(2, 3)))
    assert e.preperiod == (1, 2, 4)


def test_digit_predicates_pinned():
    assert digit_predicate(high_type(3), RcfExpansion((), (3, 4)))
    assert not digit_predicate(high_type(3), RcfExpansion((), (3, 2)))
    assert not digit_predicate(no_ones_run(2), RcfExpansion((2, 1, 1, 3), (5,)))
    assert digit_predicate(no_ones_run(2), RcfExpansion((), (1, 2)))
    assert digit_predicate(aligned_no_ones(2), RcfExpansion((), (1, 2)))
    assert not digit_predicate(no_ones_run(1), RcfExpansion((), (1, 2)))
    assert digit_predicate(no_ones_run(1), RcfExpansion((), (2, 3)))


@st.composite
def periodic_expansions(draw):
    pre = draw(st.lists(st.integers(1, 3), min_size=0, max_size=4))
    per = draw(st.lists(st.integers(1, 3), min_size=1, max_size=5))
    return RcfExpansion(pre, per)


@given(periodic_expansions(), st.integers(1, 4))
@settings(max_examples=200)
def test_window_rule_matches_bruteforce(e, n):
    # brute force over a long explicit prefix must agree with the
    # windowed evaluation formula
    pre, per = len(e.preperiod), len(e.period)
    span = pre + 4 * lcm(n, per) + 4 * n
    digits = e.digits(span)
    bf_no_run = all(
        any(d != 1 for d in digits[i:i + n])
        for i in range(len(digits) - n + 1)
    )
    assert digit_predicate(no_ones_run(n), e) == bf_no_run
    bf_aligned = all(
        any(d != 1 for d in digits[k * n:(k + 1) * n])
        for k in range(len(digits) // n)
    )
    assert digit_predicate(aligned_no_ones(n), e) == bf_aligned
    bf_high = all(d >= n for d in digits)
    assert digit_predicate(high_type(n), e) == bf_high


@given(periodic_expansions(), st.integers(1, 4))
@settings(max_examples=100)
def test_family_monotonicity(e, n):
    if digit_predicate(high_type(n + 1), e):
        assert digit_predicate(high_type(n), e)
    if digit_predicate(no_ones_run(n), e):
        assert digit_predicate(no_ones_run(n + 1), e)
        assert digit_predicate(aligned_no_ones(n), e)


def test_embed_near_golden():
    v = embed_near_golden(1, RcfExpansion((), (3,)))
    assert rcf_expand(v) == RcfExpansion((1, 1, 1, 1, 1, 2), (3,))
    assert v.compare(g) > 0
    assert in_E_via_gauss(v).member == "yes"
    v2 = embed_near_golden(1, RcfExpansion((), (2,)))
    assert rcf_expand(v2).digits(6) == (1, 1, 1, 1, 1, 2)
    with pytest.raises(PreconditionError):
        embed_near_golden(1, RcfExpansion((), (1, 2, 1, 1, 1)))


def test_embeds_approach_golden():
    prev = None
    for n in (1, 2, 3):
        v = embed_near_golden(n, RcfExpansion((), (3,)))
        assert v.compare(g) > 0
        if prev is not None:
            assert v.compare(prev) < 0
        prev = v


def test_separator_family():
    t = separator_family(2)
    assert t.lower == QuadraticNumber(-13, 1, 14, 533)
    assert t.separator == QuadraticNumber(-1, 1, 3, 10)
    assert t.upper == QuadraticNumber(-1, 1, 1, 3)
    assert t.lower_interval.right == t.separator == t.upper_interval.left
    for a in range(2, 7):
        t = separator_family(a)
        assert in_E_via_gauss(t.separator).member == "yes"
        assert t.lower_interval.index in (0, -2)
        assert t.upper_interval.index in (0, -2)
    with pytest.raises(DomainError):
        separator_family(1)


def test_four_way_orbit_equivalence():
    # the four equivalent conditions linking the parameter map to the
    # fixed golden-parameter map, sampled over exact rational pairs
    rng = random.Random(13)
    checked = 0
    while checked < 60:
        q = rng.randrange(3, 50)
        p = rng.randrange(2 * q // 3, q + 1)
        if gcd(p, q) != 1:
            continue
        alpha = F(p, q)
        if (2 * p + q) ** 2 <= 5 * q * q or alpha > 1:
            continue
        zq = rng.randrange(3, 40)
        zp = rng.randrange(-zq + 1, zq)
        z = F(zp, zq)
        if not (alpha - 1 <= z) or not (2 * z.numerator + z.denominator) ** 2 < 5 * z.denominator ** 2:
            continue  # need z in [alpha-1, g)
        checked += 1

        from alphacf.bifurcation import _tg_step_rational

        budget = 300
        # (i) orbits agree for all n (both absorb)
        xa, xg, agree = z, z, True
        for _ in range(budget):
            if xa == 0 and xg == 0:
                break
            xa = _ti_step(alpha, xa) if xa != 0 else xa
            xg = _tg_step_rational(xg) if xg != 0 else xg
            if xa != xg:
                agree = False
                break
        # (ii) golden orbit stays >= alpha - 1
        x, cond2 = z, True
        for _ in range(budget):
            if x == 0:
                break
            x = _tg_step_rational(x)
            if x < alpha - 1:
                cond2 = False
                break
        # (iii) parameter orbit stays < g
        x, cond3 = z, True
        for _ in range(budget):
            if x == 0:
                break
            x = _ti_step(alpha, x)
            if not (2 * x.numerator + x.denominator) ** 2 < 5 * x.denominator ** 2:
                cond3 = False
                break
        # (iv) parameter orbit stays <= 1/(alpha+1)
        x, cond4 = z, True
        for _ in range(budget):
            if x == 0:
                break
            x = _ti_step(alpha, x)
            if x > 1 / (alpha + 1):
                cond4 = False
                break
        assert agree == cond2 == cond3 == cond4, (alpha, z)


def test_membership_interval():
    v = membership_interval(F(699, 1000), F(701, 1000))
    assert v.member == "no" and v.witness["epsilon"] == 1
    v = membership_interval(F(799, 1000), F(801, 1000))
    assert v.member == "undecided"  # contains 4/5 plus nearby non-members
    with pytest.raises(DomainError):
        membership_interval(F(1, 4), F(1, 3))
