"""Exact arithmetic: canonical forms, order, floors, expansions, round trips."""

import random
from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphacf.errors import DivisionByZeroError, DomainError, MixedFieldError, PoleError
from alphacf.exactnum import (
    GOLDEN,
    MobiusMap,
    QuadraticNumber,
    RcfExpansion,
    parse_value,
    rcf_eval,
    rcf_expand,
    simplest_rational_between,
    squarefree_decompose,
)

QN = QuadraticNumber
g = GOLDEN


def test_canonical_form_examples():
    assert QN(2, 0, 4, 0) == QN(1, 0, 2, 0)
    assert QN(0, 1, 1, 8) == QN(0, 2, 1, 2)  # sqrt(8) = 2 sqrt(2)
    assert QN(0, 1, 1, 9) == QN(3, 0, 1, 0)  # sqrt(9) = 3
    assert QN(1, 1, -2, 5) == QN(-1, -1, 2, 5)
    with pytest.raises(DivisionByZeroError):
        QN(1, 0, 0, 0)


@given(st.integers(1, 10**7))
def test_squarefree_decompose(n):
    s, f = squarefree_decompose(n)
    assert s * s * f == n
    r = 2
    while r * r <= f:
        assert f % (r * r) != 0
        r += 1


def test_golden_identities():
    assert g * g == 1 - g
    assert g.inverse() == g + 1
    assert (g * g).inverse() == g + 2
    assert g + (1 - g) == 1


def test_addition_examples():
    s5 = QN.sqrt_of(5)
    assert (1 + s5) / 2 + (-1 + s5) / 2 == s5
    s2 = QN.sqrt_of(2)
    assert (s2 - 1) + (2 - s2) == 1


def test_mixed_field_rejected_for_algebra():
    with pytest.raises(MixedFieldError):
        QN.sqrt_of(2) + QN.sqrt_of(5)
    with pytest.raises(MixedFieldError):
        QN.sqrt_of(3) * QN.sqrt_of(7)


def test_cross_field_comparison():
    # ordering is defined across fields even though algebra is not
    assert g > 2 - QN.sqrt_of(2)
    assert QN.sqrt_of(2) < QN.sqrt_of(3)
    assert (QN.sqrt_of(2) - 1).compare(QN.sqrt_of(5) - 1) < 0


def test_floor_examples():
    assert QN.sqrt_of(5).floor() == 2
    assert (-(g + 2) + (1 - g)).floor() == -3
    assert QN.from_rational(Fraction(7, 10)).floor() == 0
    assert QN.from_rational(Fraction(-7, 10)).floor() == -1
    assert (-QN.sqrt_of(2)).floor() == -2


@given(st.fractions(min_value=-100, max_value=100))
def test_rational_ops_match_fraction_oracle(x):
    q = QN.from_rational(x)
    assert q.as_fraction() == x
    assert (q + q).as_fraction() == 2 * x
    assert (q * q).as_fraction() == x * x
    assert q.floor() == x.numerator // x.denominator
    if x:
        assert q.inverse().as_fraction() == 1 / x


@st.composite
def quadratics(draw):
    a = draw(st.integers(-30, 30))
    b = draw(st.integers(-10, 10))
    c = draw(st.integers(1, 20))
    d = draw(st.sampled_from([2, 3, 5, 6, 7, 10, 13]))
    return QN(a, b, c, d)


@given(quadratics(), quadratics())
@settings(max_examples=200)
def test_cmp_agrees_with_interval_oracle(x, y):
    # 200-bit rational enclosures decide whenever they separate
    xlo, xhi = x.to_interval(200)
    ylo, yhi = y.to_interval(200)
    c = x.compare(y) if (x.d == y.d or x.is_rational or y.is_rational) else None
    if c is None:
        return
    if xhi < ylo:
        assert c < 0
    elif xlo > yhi:
        assert c > 0
    else:
        assert c == 0 or x.d == y.d


@given(quadratics())
def test_interval_encloses_value(x):
    lo, hi = x.to_interval(96)
    assert lo <= Fraction(float(x)).limit_denominator(10**15) + Fraction(1, 10**12)
    # exact containment: compare against the number itself
    assert x.compare(lo) >= 0
    assert x.compare(hi) <= 0


@given(quadratics(), quadratics())
@settings(max_examples=200)
def test_field_arithmetic_consistency(x, y):
    if x.d != y.d and not (x.is_rational or y.is_rational):
        return
    s = x + y
    assert s - y == x
    p = x * y
    if not y.is_zero:
        assert p / y == x


def test_mobius_examples():
    ident = MobiusMap.identity()
    assert ident.apply(Fraction(7, 10)).as_fraction() == Fraction(7, 10)
    f2 = MobiusMap.digit(2)
    assert f2.apply(0).as_fraction() == Fraction(1, 2)
    f1 = MobiusMap.digit(1)
    assert (f1 @ f1).apply(g) == g
    with pytest.raises(DomainError):
        MobiusMap(1, 2, 2, 4)
    with pytest.raises(PoleError):
        MobiusMap(1, 0, 1, -1).apply(1)


@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4),
       st.lists(st.integers(-5, 5), min_size=4, max_size=4),
       quadratics())
@settings(max_examples=150)
def test_mobius_composition_functorial(m1, m2, x):
    try:
        a = MobiusMap(*m1)
        b = MobiusMap(*m2)
    except DomainError:
        return
    try:
        lhs = (a @ b).apply(x)
        rhs = a.apply(b.apply(x))
    except PoleError:
        return
    assert lhs == rhs


def test_rcf_examples():
    assert str(rcf_expand(Fraction(7, 10))) == "[0;1,2,3]"
    assert rcf_expand(g) == RcfExpansion((), (1,))
    assert rcf_expand(QN.sqrt_of(2) - 1) == RcfExpansion((), (2,))
    assert rcf_eval(RcfExpansion((1, 2, 2, 1), ())).as_fraction() == Fraction(7, 10)
    assert rcf_eval(RcfExpansion((), (1, 2))) == QN(-1, 1, 1, 3)
    # separator word for digit 2
    assert rcf_eval(RcfExpansion((), (1, 2, 1))) == QN(-1, 1, 3, 10)


def test_rcf_canonicalization():
    assert RcfExpansion((1, 2, 2, 1), ()) == RcfExpansion((1, 2, 3), ())
    assert RcfExpansion((), (1, 2, 1, 1, 2, 1)) == RcfExpansion((), (1, 2, 1))
    assert RcfExpansion((2, 1), (2, 1)) == RcfExpansion((), (2, 1))
    assert RcfExpansion((1,), ()).preperiod == (1,)  # [0;1] kept as is
    with pytest.raises(DomainError):
        RcfExpansion((0, 2), ())


def test_rcf_domain():
    with pytest.raises(DomainError):
        rcf_expand(Fraction(3, 2))
    with pytest.raises(DomainError):
        rcf_expand(Fraction(-1, 2))
    assert rcf_expand(Fraction(0)) == RcfExpansion((), ())


@given(st.fractions(min_value=0, max_value=1))
@settings(max_examples=300)
def test_rational_round_trip(x):
    if x == 1:
        return
    e = rcf_expand(x)
    assert e.is_finite
    assert rcf_eval(e).as_fraction() == x


def test_rational_round_trip_exhaustive_small():
    # every reduced p/q with q <= 120 in (0, 1)
    for q in range(2, 121):
        for p in range(1, q):
            x = Fraction(p, q)
            if x.denominator != q:
                continue
            assert rcf_eval(rcf_expand(x)).as_fraction() == x


@given(st.lists(st.integers(1, 9), min_size=1, max_size=6),
       st.lists(st.integers(1, 9), min_size=0, max_size=3))
@settings(max_examples=150)
def test_periodic_round_trip(period, pre):
    e = RcfExpansion(pre, period)
    v = rcf_eval(e)
    assert not v.is_rational
    assert 0 < float(v) < 1
    assert rcf_expand(v) == e  # both sides canonical


def test_simplest_rational():
    assert simplest_rational_between(Fraction(1, 3), Fraction(2, 3)) == Fraction(1, 2)
    left = rcf_eval(RcfExpansion((1, 2), (3,)))
    right = QN(0, 1, 2, 2)
    assert simplest_rational_between(left, right) == Fraction(7, 10)
    with pytest.raises(DomainError):
        simplest_rational_between(Fraction(1, 2), Fraction(1, 2))


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100)),
       st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1, 10)))
@settings(max_examples=100)
def test_simplest_rational_minimality_bruteforce(lo, width):
    hi = lo + width
    got = simplest_rational_between(lo, hi)
    assert lo < got < hi
    # no rational with smaller denominator inside (lo, hi)
    for q in range(1, got.denominator):
        p_lo = (lo.numerator * q) // lo.denominator
        for p in (p_lo, p_lo + 1, p_lo + 2):
            r = Fraction(p, q)
            assert not (lo < r < hi)


def test_serialization_round_trip():
    values = [
        QN.from_rational(Fraction(7, 10)),
        QN.from_rational(3),
        g,
        QN(5, -1, 2, 13),
        QN(0, 1, 2, 2),
    ]
    for v in values:
        assert parse_value(v.exact_str()) == v
    e = RcfExpansion((1, 2), (3,))
    assert RcfExpansion.parse(str(e)) == e
    assert RcfExpansion.parse("[0;(1)]") == RcfExpansion((), (1,))
    assert RcfExpansion.parse("[0;]") == RcfExpansion((), ())
    assert parse_value("[0;1,2,(3)]") == QN(5, -1, 2, 13)
    with pytest.raises(ValueError):
        parse_value("nonsense")


def test_hash_consistency_for_rationals():
    assert hash(QN.from_rational(Fraction(1, 2))) == hash(Fraction(1, 2))
    s = {QN.from_rational(Fraction(1, 2)), QN(1, 0, 2, 0)}
    assert len(s) == 1


def test_pickle_round_trip():
    import pickle

    for obj in (g, MobiusMap.digit(3), RcfExpansion((1,), (2, 3))):
        assert pickle.loads(pickle.dumps(obj)) == obj
