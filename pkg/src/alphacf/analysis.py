"""Desk-scale estimators: entropy, coverage of the matching set, box counting.

Entropy is estimated from the growth of convergent denominators along
float64 orbits (2 log|q_n| / n averaged over random starts); coverage and
box counts are exact consequences of a finite interval scan.  The scan
necessarily misses intervals with large pseudocenter denominators, so the
uncovered remainder overestimates the bifurcation set and box-count slopes
are upper bounds; reports say so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .cfdyn import FamilyKind
from .errors import (
    DegenerateOrbitError,
    DomainError,
    InsufficientResolutionError,
)
from .exactnum import GOLDEN, QuadraticNumber
from .matching import ScanResult, as_exact_qn, scan_intervals

__all__ = [
    "EntropyEstimate",
    "CoverageReport",
    "DimensionEstimate",
    "estimate_entropy",
    "entropy_curve",
    "coverage",
    "boxcount_dimension",
    "dyadic_scales",
    "fibonacci_threshold",
]

BURN_IN = 100
_ZERO_RESTART_CAP_FACTOR = 1  # restarts allowed per sample on exact zeros


@dataclass(frozen=True)
class EntropyEstimate:
    family: FamilyKind
    alpha: float
    mean: float  # nats
    std_error: float  # sample std / sqrt(n_samples)
    n_iter: int
    n_samples: int
    seed: int

    def combined_error(self, other: "EntropyEstimate") -> float:
        return math.hypot(self.std_error, other.std_error)


def estimate_entropy(family: FamilyKind, alpha, n_iter: int, n_samples: int,
                     seed: int, burn_in: int = BURN_IN) -> EntropyEstimate:
    """Monte-Carlo entropy from denominator growth, 2 log|q_n| / n.

    Uniform random starts in (alpha-1, alpha) (in (0,1) for the Gauss map),
    a burn-in before statistics, and q tracked as a renormalized mantissa
    with an accumulated log to survive past float range.  Deterministic for
    a fixed seed (PCG64; vectorized reductions in fixed order).
    """
    af = float(alpha)
    if family is FamilyKind.GAUSS:
        af = 1.0
    if not 0.0 < af <= 1.0:
        raise DomainError(f"alpha = {af} outside (0, 1]")
    if n_iter < 100 or n_samples < 10:
        raise DomainError("need n_iter >= 100 and n_samples >= 10")
    rng = np.random.Generator(np.random.PCG64(seed))
    lo, hi = (0.0, 1.0) if family is FamilyKind.GAUSS else (af - 1.0, af)
    x = rng.uniform(lo, hi, n_samples)
    restarts = 0
    cap = _ZERO_RESTART_CAP_FACTOR * n_samples

    def advance(x, track=None):
        nonlocal restarts
        inv = 1.0 / x
        if family is FamilyKind.NAKADA:
            # signed entries: x = eps/(d + T(x)), so eps enters the recurrence
            eps = np.sign(inv)
            inv = np.abs(inv)
        else:
            eps = 1.0
        d = np.floor(inv + (1.0 - af))
        x_new = inv - d
        bad = ~np.isfinite(x_new) | (x_new == 0.0) | (x == 0.0)
        if bad.any():
            restarts += int(bad.sum())
            if restarts > cap:
                raise DegenerateOrbitError(
                    f"{restarts} zero/overflow hits exceed the restart cap"
                )
            x_new = np.where(bad, rng.uniform(lo, hi, n_samples), x_new)
            d = np.where(bad, 0.0, d)
        if track is not None:
            q_prev, q_cur, acc = track
            q_prev, q_cur = q_cur, d * q_cur + eps * q_prev
            mag = np.abs(q_cur)
            mag = np.where(mag == 0.0, 1.0, mag)
            acc = acc + np.log(mag)
            q_prev, q_cur = q_prev / mag, q_cur / mag
            return x_new, (q_prev, q_cur, acc)
        return x_new, None

    for _ in range(burn_in):
        x, _ = advance(x)
    track = (np.zeros(n_samples), np.ones(n_samples), np.zeros(n_samples))
    for _ in range(n_iter):
        x, track = advance(x, track)
    _, q_cur, acc = track
    stats = 2.0 * (acc + np.log(np.abs(q_cur))) / n_iter
    mean = float(np.mean(stats))
    std_error = float(np.std(stats, ddof=1) / math.sqrt(n_samples))
    return EntropyEstimate(family, af, mean, std_error, n_iter, n_samples, seed)


def entropy_curve(families: Sequence[FamilyKind], grid_lo: float, grid_hi: float,
                  step: float, n_iter: int, n_samples: int,
                  seed: int) -> list[EntropyEstimate]:
    """One estimate per family per grid point; empty when grid_lo > grid_hi."""
    out: list[EntropyEstimate] = []
    if grid_lo > grid_hi:
        return out
    n_pts = int(math.floor((grid_hi - grid_lo) / step + 1e-9)) + 1
    for i in range(n_pts):
        a = grid_lo + i * step
        for k, fam in enumerate(families):
            out.append(estimate_entropy(fam, a, n_iter, n_samples,
                                        seed + 1000003 * i + k))
    return out


@dataclass(frozen=True)
class CoverageReport:
    max_den: int
    lo: float
    hi: float
    covered: float
    fraction: float
    interval_count: int
    # exact rational enclosure of the fraction, for monotonicity comparisons
    fraction_lo: Fraction
    fraction_hi: Fraction


def coverage(max_den: int, lo, hi, scan: Optional[ScanResult] = None,
             bits: int = 128) -> CoverageReport:
    """Total length of scanned matching intervals clipped to [lo, hi].

    Lengths are summed as exact rational enclosures (>= `bits` precision per
    endpoint), so coverage fractions for different max_den are comparable
    without floating error.
    """
    qlo = as_exact_qn(lo)
    qhi = as_exact_qn(hi)
    if scan is None:
        scan = scan_intervals(qlo, qhi, max_den)
    acc_lo = Fraction(0)
    acc_hi = Fraction(0)
    count = 0
    for iv in scan.intervals:
        left = iv.left if iv.left.compare(qlo) > 0 else qlo
        right = iv.right if iv.right.compare(qhi) < 0 else qhi
        if left.compare(right) >= 0:
            continue
        count += 1
        l_lo, l_hi = left.to_interval(bits)
        r_lo, r_hi = right.to_interval(bits)
        acc_lo += r_lo - l_hi
        acc_hi += r_hi - l_lo
    w_lo, w_hi = qlo.to_interval(bits)
    v_lo, v_hi = qhi.to_interval(bits)
    width_lo, width_hi = v_lo - w_hi, v_hi - w_lo
    frac_lo = acc_lo / width_hi if width_hi else Fraction(0)
    frac_hi = acc_hi / width_lo if width_lo else Fraction(0)
    return CoverageReport(
        max_den=scan.max_den,
        lo=float(qlo),
        hi=float(qhi),
        covered=float((acc_lo + acc_hi) / 2),
        fraction=float((frac_lo + frac_hi) / 2),
        interval_count=count,
        fraction_lo=frac_lo,
        fraction_hi=frac_hi,
    )


@dataclass(frozen=True)
class DimensionEstimate:
    lo: float
    hi: float
    max_den: int
    scales: tuple[float, ...]
    counts: tuple[int, ...]
    slope: float
    r2: float
    note: str = "slope is an upper-bound proxy: gaps of a finite scan contain undiscovered intervals"


def dyadic_scales(lo, hi, count: int = 6, first_exp: int = 4) -> list[Fraction]:
    """Box widths (hi-lo)/2**k for k = first_exp .. first_exp+count-1."""
    qlo = as_exact_qn(lo)
    qhi = as_exact_qn(hi)
    w_lo, w_hi = (qhi - qlo).to_interval(160) if qhi.d == qlo.d or qlo.is_rational or qhi.is_rational else (None, None)
    if w_lo is None:
        a, b = qlo.to_interval(160), qhi.to_interval(160)
        width = (b[0] + b[1]) / 2 - (a[0] + a[1]) / 2
    else:
        width = (w_lo + w_hi) / 2
    return [width / (1 << k) for k in range(first_exp, first_exp + count)]


def _floor_offset_ratio(u: QuadraticNumber, base: QuadraticNumber,
                        w: Fraction) -> int:
    """Exact floor((u - base)/w), tolerating distinct quadratic fields.

    Same-field (or rational) operands use the exact field floor.  Distinct
    irrational fields make the ratio irrational, so interval refinement
    always separates it from the nearest integer.
    """
    if u.d == base.d or u.is_rational or base.is_rational:
        return ((u - base) * Fraction(w.denominator, w.numerator)).floor()
    bits = 96
    while True:
        u_lo, u_hi = u.to_interval(bits)
        b_lo, b_hi = base.to_interval(bits)
        f_lo = ((u_lo - b_hi) / w).__floor__()
        f_hi = ((u_hi - b_lo) / w).__floor__()
        if f_lo == f_hi:
            return f_lo
        bits *= 2
        if bits > 1 << 16:  # pragma: no cover
            raise AssertionError("floor refinement failed to separate")


def boxcount_dimension(lo, hi, max_den: int, scales: Sequence[Fraction],
                       scan: Optional[ScanResult] = None) -> DimensionEstimate:
    """Box counts of the uncovered complement, with a log-log slope.

    Boxes are half-open [lo + i*w, lo + (i+1)*w); a box counts when it
    meets the closed complement of the scanned intervals.  Box indices come
    from exact floors of (gap endpoint - lo)/w, so counts carry no rounding
    ambiguity.
    """
    qlo = as_exact_qn(lo)
    qhi = as_exact_qn(hi)
    widths = [w if isinstance(w, Fraction) else Fraction(w).limit_denominator(10**12)
              for w in scales]
    if sorted(widths, reverse=True) != list(widths):
        raise DomainError("scales must be decreasing")
    if scan is None:
        scan = scan_intervals(qlo, qhi, max_den)
    gaps = []
    for u, v in scan.gaps():
        if u.compare(qlo) < 0:
            u = qlo
        if v.compare(qhi) > 0:
            v = qhi
        if u.compare(v) <= 0:
            gaps.append((u, v))
    counts: list[int] = []
    for w in widths:
        if w <= 0:
            raise DomainError("scales must be positive")
        last_box = _floor_offset_ratio(qhi, qlo, w)
        hi_on_grid = (
            (qhi.d == qlo.d or qhi.is_rational or qlo.is_rational)
            and ((qhi - qlo) * Fraction(w.denominator, w.numerator)
                 - last_box).is_zero
        )
        if hi_on_grid:
            last_box -= 1
        spans: list[tuple[int, int]] = []
        for u, v in gaps:
            i0 = _floor_offset_ratio(u, qlo, w)
            i1 = min(_floor_offset_ratio(v, qlo, w), last_box)
            spans.append((max(i0, 0), i1))
        spans.sort()
        total = 0
        cur_lo, cur_hi = None, None
        for i0, i1 in spans:
            if i1 < i0:
                continue
            if cur_hi is None or i0 > cur_hi:
                if cur_hi is not None:
                    total += cur_hi - cur_lo + 1
                cur_lo, cur_hi = i0, i1
            else:
                cur_hi = max(cur_hi, i1)
        if cur_hi is not None:
            total += cur_hi - cur_lo + 1
        counts.append(total)
    if len({c for c in counts}) < 3:
        raise InsufficientResolutionError(
            f"only {len(set(counts))} distinct box counts across the scales"
        )
    xs = np.log([1.0 / float(w) for w in widths])
    ys = np.log(np.array(counts, dtype=float))
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot else 1.0
    return DimensionEstimate(
        lo=float(qlo), hi=float(qhi), max_den=scan.max_den,
        scales=tuple(float(w) for w in widths), counts=tuple(counts),
        slope=float(slope), r2=r2,
    )


def fibonacci_threshold(delta: Fraction) -> int:
    """Least n >= 1 with F(2n)/F(2n+1) <= g + delta; seeds F0 = F1 = 1.

    The returned n indexes the digit-run constraint set that provably
    contains the bifurcation set beyond g + delta, which dimension reports
    cite alongside the box-count slope.
    """
    if not isinstance(delta, Fraction):
        delta = Fraction(delta)
    if delta <= 0:
        raise DomainError("delta must be positive")
    bound = GOLDEN + delta
    f_prev, f_cur = 1, 1  # F0, F1
    n = 0
    while True:
        n += 1
        f_prev, f_cur = f_cur, f_cur + f_prev  # -> F(2n-1), F(2n)
        f_prev, f_cur = f_cur, f_cur + f_prev  # -> F(2n),   F(2n+1)
        if bound.compare(Fraction(f_prev, f_cur)) >= 0:
            return n
