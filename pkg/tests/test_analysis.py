"""Estimators: entropy against independent oracles, coverage, box counts."""

import math
from fractions import Fraction

import numpy as np
import pytest

from alphacf.analysis import (
    boxcount_dimension,
    coverage,
    dyadic_scales,
    entropy_curve,
    estimate_entropy,
    fibonacci_threshold,
)
from alphacf.cfdyn import FamilyKind
from alphacf.errors import DomainError, InsufficientResolutionError
from alphacf.exactnum import GOLDEN
from alphacf.matching import scan_intervals

F = Fraction
g = GOLDEN
TI, NK, GA = FamilyKind.TANAKA_ITO, FamilyKind.NAKADA, FamilyKind.GAUSS

GAUSS_ENTROPY = math.pi**2 / (6 * math.log(2))


def birkhoff_gauss_entropy(n_iter: int, n_samples: int, seed: int) -> float:
    """Independent oracle: time average of 2 log(1/x) along Gauss orbits."""
    rng = np.random.Generator(np.random.PCG64(seed))
    x = rng.uniform(0.0, 1.0, n_samples)
    for _ in range(100):
        x = 1.0 / x
        x -= np.floor(x)
        x[x == 0.0] = rng.uniform(0.0, 1.0, int((x == 0.0).sum())) if (x == 0.0).any() else x[x == 0.0]
    acc = np.zeros(n_samples)
    for _ in range(n_iter):
        acc += -2.0 * np.log(x)
        x = 1.0 / x
        x -= np.floor(x)
        bad = x == 0.0
        if bad.any():
            x = np.where(bad, rng.uniform(0.0, 1.0, n_samples), x)
    return float(np.mean(acc / n_iter))


def test_gauss_entropy_against_both_oracles():
    est = estimate_entropy(GA, 1, 5000, 400, seed=99)
    assert abs(est.mean - GAUSS_ENTROPY) / GAUSS_ENTROPY < 0.01
    indep = birkhoff_gauss_entropy(5000, 400, seed=123)
    assert abs(est.mean - indep) < 0.02


def test_entropy_determinism():
    a = estimate_entropy(TI, 0.7, 500, 50, seed=5)
    b = estimate_entropy(TI, 0.7, 500, 50, seed=5)
    assert a == b
    c = estimate_entropy(TI, 0.7, 500, 50, seed=6)
    assert c.mean != a.mean


def test_entropy_domain():
    with pytest.raises(DomainError):
        estimate_entropy(TI, 1.5, 500, 50, seed=1)
    with pytest.raises(DomainError):
        estimate_entropy(TI, 0.7, 50, 50, seed=1)


def test_entropy_symmetry_quick():
    e1 = estimate_entropy(TI, 0.6, 3000, 300, seed=21)
    e2 = estimate_entropy(TI, 0.4, 3000, 300, seed=22)
    assert abs(e1.mean - e2.mean) < 3 * e1.combined_error(e2)


def test_curve_families_and_empty():
    pts = entropy_curve([TI, NK], 0.48, 0.52, 0.02, 800, 80, seed=3)
    assert len(pts) == 6
    assert entropy_curve([GA], 0.6, 0.5, 0.1, 500, 50, seed=3) == []
    for i in range(0, 6, 2):
        ti, nk = pts[i], pts[i + 1]
        assert abs(ti.mean - nk.mean) < 4 * ti.combined_error(nk)


@pytest.fixture(scope="module")
def scan60():
    return scan_intervals(g, 1, 60)


def test_coverage_monotone(scan60):
    r10 = coverage(10, g, 1)
    r60 = coverage(60, g, 1, scan=scan60)
    assert 0 < r10.fraction < r60.fraction < 1
    assert r10.fraction_hi < r60.fraction_lo  # exact enclosure comparison


def test_coverage_subrange_full(scan60):
    rep = coverage(60, F(699, 1000), F(705, 1000), scan=scan60)
    assert abs(rep.fraction - 1.0) < 1e-25
    assert rep.interval_count == 1


def test_coverage_members_uncovered(scan60):
    for m in scan60.members:
        assert scan60.point_in_gap(m)


def test_boxcount_invariants(scan60):
    scales = dyadic_scales(g, 1, count=7, first_exp=3)
    est = boxcount_dimension(g, 1, 60, scales, scan=scan60)
    assert 0.0 <= est.slope <= 1.0
    # counts nondecreasing as the width halves, and at most doubling
    # plus a boundary term
    for n_w, n_half in zip(est.counts, est.counts[1:]):
        assert n_w <= n_half <= 2 * n_w + 2 * len(scan60.intervals)
    assert est.r2 > 0.9


def test_boxcount_single_interval_complement():
    # complement of one interval inside a slightly wider range: the two side
    # gaps give a flat count at fine scales, slope near zero
    scan = scan_intervals(g, 1, 60)
    iv = next(i for i in scan.intervals if i.pseudocenter == F(7, 10))
    sub = scan_intervals(g, 1, 10)  # contains only the 7/10 interval
    lo, hi = F(69, 100), F(71, 100)
    scales = [F(1, 100) / (1 << k) for k in range(7)]
    est = boxcount_dimension(lo, hi, 10, scales, scan=sub)
    assert est.counts[-1] <= est.counts[0] + 4
    assert est.slope < 0.2


def test_boxcount_insufficient_resolution():
    sub = scan_intervals(g, 1, 10)
    scales = [F(1, 5), F(1, 7)]
    with pytest.raises(InsufficientResolutionError):
        boxcount_dimension(F(69, 100), F(71, 100), 10, scales, scan=sub)


def test_fibonacci_threshold_pinned():
    assert fibonacci_threshold(F(1, 10)) == 1
    assert fibonacci_threshold(F(100)) == 1
    assert fibonacci_threshold(F(1, 1000)) == 4
    # exact descent: ratios F(2n)/F(2n+1) decrease toward the golden value
    with pytest.raises(DomainError):
        fibonacci_threshold(F(0))


def test_fibonacci_threshold_is_minimal():
    # verify minimality directly from the ratio sequence
    for delta in (F(1, 10), F(1, 100), F(1, 1000), F(1, 10**6)):
        n = fibonacci_threshold(delta)
        fibs = [1, 1]
        while len(fibs) < 2 * n + 2:
            fibs.append(fibs[-1] + fibs[-2])
        bound = g + delta
        assert bound.compare(F(fibs[2 * n], fibs[2 * n + 1])) >= 0
        if n > 1:
            assert bound.compare(F(fibs[2 * n - 2], fibs[2 * n - 1])) < 0
