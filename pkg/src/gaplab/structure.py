"""Gap-structure machinery: descendants, moment functionals, multiset identity.

A coarse prefix of M points carves the torus into M half-open cells (the M-th
wraps around). Because later points only subdivide, every fine gap interval of
a longer prefix lies inside exactly one coarse cell; the count of fine gaps
per coarse cell is the cell's descendant count. For zero-width fine intervals
(coincident points) containment is decided by the interval's anchor point, the
unique convention under which the counts always partition N.

The moment functional is reported in two weightings side by side: the
``literal`` form sums (1/g_i) * (c_i/N)^k over coarse cells, the ``corrected``
form sums g_i * (c_i/(N*g_i))^k. They coincide at k = 2; the corrected form is
the Riemann sum of the k-th power of the per-cell point density and is
identically 1 at k = 1. Both are computed in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gapstats import (GapLabError, GridMismatchError, GridPoint, PointSet,
                       gaps)


class MomentUndefinedError(GapLabError):
    """The 1/g weighting is undefined when a coarse gap has zero length."""


@dataclass(frozen=True)
class DuplicateGap:
    """First duplicated gap length found at stage n."""

    n: int
    length: GridPoint


def distinct_gaps_check(ps: PointSet) -> DuplicateGap | None:
    """Verify that all gaps at this stage are pairwise distinct (exact).

    Returns None when distinct, else the duplicated length. Sequences built
    by the grid construction fail this by design: the snapping step creates
    many gaps of exactly the same size.
    """
    if not ps.is_exact:
        raise GapLabError("distinct-gaps check needs exact points")
    g = gaps(ps)
    nums = g.numerators
    dup = np.flatnonzero(nums[1:] == nums[:-1])
    if dup.size == 0:
        return None
    return DuplicateGap(n=ps.n,
                        length=GridPoint(int(nums[dup[0]]), g.denominator))


@dataclass(frozen=True)
class DescendantIndex:
    """Per-coarse-cell counts of fine gap intervals contained in the cell.

    ``gap_nums[i]`` is the i-th coarse cell length (ordered cells, wrap cell
    last) over ``den``; ``counts[i]`` the number of stage-N gap intervals
    inside it. Counts are nonnegative and sum to N.
    """

    coarse_n: int
    fine_n: int
    den: int
    gap_nums: np.ndarray
    counts: np.ndarray


def descendants(ps: PointSet, m: int, n: int) -> DescendantIndex:
    """Count fine gaps (first n points) inside each coarse cell (first m).

    Prefix semantics: both stages come from the same point sequence, so the
    coarse points are a subset of the fine points and every fine interval
    has a unique home cell (the one containing its left endpoint).
    """
    if m >= n:
        raise GapLabError(f"need coarse stage {m} < fine stage {n}")
    if n > ps.n:
        raise GapLabError(f"fine stage {n} exceeds {ps.n} points")
    if m < 1:
        raise GapLabError("coarse stage must be positive")
    if ps.is_exact:
        coarse = np.sort(ps.numerators[:m])
        fine = np.sort(ps.numerators[:n])
        den = ps.denominator
        gap_nums = np.empty(m, dtype=np.int64)
        gap_nums[:-1] = coarse[1:] - coarse[:-1]
        gap_nums[-1] = den - coarse[-1] + coarse[0]
    else:
        coarse = np.sort(ps.values[:m])
        fine = np.sort(ps.values[:n])
        den = 0
        gap_nums = np.empty(m, dtype=np.float64)
        gap_nums[:-1] = coarse[1:] - coarse[:-1]
        gap_nums[-1] = 1.0 - coarse[-1] + coarse[0]

    # Home cell of each fine interval, by left endpoint. Cells are the m
    # half-open intervals [c_i, c_{i+1}) plus the wrap cell, which owns both
    # endpoints' outer sides.
    idx = np.searchsorted(coarse, fine, side="right") - 1
    idx[idx < 0] = m - 1
    counts = np.bincount(idx, minlength=m).astype(np.int64)
    return DescendantIndex(coarse_n=m, fine_n=n, den=den,
                           gap_nums=gap_nums, counts=counts)


@dataclass(frozen=True)
class MomentReport:
    """Both weightings of the descendant moment functional at (M, N, k)."""

    coarse_n: int
    fine_n: int
    k: int
    literal: Fraction
    corrected: Fraction

    @property
    def literal_float(self) -> float:
        return float(self.literal)

    @property
    def corrected_float(self) -> float:
        return float(self.corrected)


def moment_functional(ps: PointSet, m: int, n: int, k: int) -> MomentReport:
    """Evaluate both moment weightings exactly from the descendant counts."""
    if k < 1:
        raise GapLabError("moment order k must be >= 1")
    if not ps.is_exact:
        raise GapLabError("moment functional needs exact points")
    d = descendants(ps, m, n)
    if np.any(d.gap_nums == 0):
        raise MomentUndefinedError(
            "moment undefined for coincident coarse points")
    literal = Fraction(0)
    corrected = Fraction(0)
    for gi, ci in zip(d.gap_nums.tolist(), d.counts.tolist()):
        g = Fraction(gi, d.den)
        ratio = Fraction(ci, n) ** k
        literal += ratio / g
        corrected += ratio * g ** (1 - k)
    return MomentReport(coarse_n=m, fine_n=n, k=k, literal=literal,
                        corrected=corrected)


def same_gap_multiset(a: PointSet, b: PointSet) -> bool:
    """Exact equality of the two gap multisets (needs equal sizes, exact points)."""
    if a.n != b.n:
        raise GapLabError(f"cardinality mismatch: {a.n} vs {b.n}")
    if not (a.is_exact and b.is_exact):
        raise GapLabError("gap multiset comparison needs exact points")
    if math.lcm(a.denominator, b.denominator) >= 1 << 63:
        raise GridMismatchError("incompatible grids: common denominator "
                                "exceeds 64-bit capacity")
    return gaps(a) == gaps(b)
