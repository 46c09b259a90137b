"""Spacing statistics for finite point multisets in the half-open unit interval.

Points live on the unit torus: the gap list of an N-point set always has N
entries, the last one wrapping around from the largest point to the smallest.
A point set is either *exact* (integer numerators over one common denominator,
so gap multisets can be compared without any floating point) or *real*
(float64 values). Mixed sets are rejected.

All operations are pure functions of immutable inputs; callers may evaluate
different thresholds or different point sets in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np


class GapLabError(ValueError):
    """Base class for domain errors raised by this package."""


class GridMismatchError(GapLabError):
    """Two objects that must share a grid or sampling grid do not."""


@dataclass(frozen=True)
class GridPoint:
    """Exact rational point num/den with 0 <= num < den (or num <= den for lengths)."""

    num: int
    den: int

    def __post_init__(self):
        if self.den <= 0:
            raise GapLabError("denominator must be positive")
        if not 0 <= self.num <= self.den:
            raise GapLabError("grid point outside [0, 1]")

    @property
    def value(self) -> float:
        return self.num / self.den

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)


def _as_int64(arr, name: str) -> np.ndarray:
    out = np.asarray(arr, dtype=np.int64)
    if out.ndim != 1:
        raise GapLabError(f"{name} must be one-dimensional")
    return out


@dataclass(frozen=True)
class PointSet:
    """Finite multiset of points in [0, 1) with original-index labels.

    Exactly one of (numerators, denominator) / values is set. Labels record
    the original position n of each point, so stable orderings can break
    value ties by ascending original index.
    """

    labels: np.ndarray
    numerators: np.ndarray | None = None
    denominator: int | None = None
    values: np.ndarray | None = None

    @staticmethod
    def exact(numerators, denominator: int, labels=None) -> "PointSet":
        nums = _as_int64(numerators, "numerators")
        den = int(denominator)
        if den <= 0:
            raise GapLabError("denominator must be positive")
        if den >= 1 << 63:
            raise GapLabError("denominator exceeds 64-bit capacity")
        if nums.size and (nums.min() < 0 or nums.max() >= den):
            raise GapLabError("exact point outside [0, 1)")
        if labels is None:
            labels = np.arange(1, nums.size + 1, dtype=np.int64)
        return PointSet(labels=_as_int64(labels, "labels"), numerators=nums,
                        denominator=den)

    @staticmethod
    def real(values, labels=None) -> "PointSet":
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 1:
            raise GapLabError("values must be one-dimensional")
        if vals.size and (vals.min() < 0.0 or vals.max() >= 1.0):
            raise GapLabError("point outside [0, 1)")
        if labels is None:
            labels = np.arange(1, vals.size + 1, dtype=np.int64)
        return PointSet(labels=_as_int64(labels, "labels"), values=vals)

    @property
    def n(self) -> int:
        return int(self.labels.size)

    def __len__(self) -> int:
        return self.n

    @property
    def is_exact(self) -> bool:
        return self.numerators is not None

    def float_values(self) -> np.ndarray:
        if self.is_exact:
            return self.numerators.astype(np.float64) / float(self.denominator)
        return self.values

    def rescaled_numerators(self, new_den: int) -> np.ndarray:
        """Numerators over a refining denominator (new_den must be a multiple)."""
        if not self.is_exact:
            raise GapLabError("point set is not exact")
        if new_den % self.denominator != 0:
            raise GridMismatchError(
                f"denominator {self.denominator} does not divide {new_den}")
        return self.numerators * np.int64(new_den // self.denominator)

    def prefix(self, n: int) -> "PointSet":
        """First n points in original storage order."""
        if n > self.n:
            raise GapLabError(f"prefix length {n} exceeds {self.n} points")
        if self.is_exact:
            return PointSet(labels=self.labels[:n], numerators=self.numerators[:n],
                            denominator=self.denominator)
        return PointSet(labels=self.labels[:n], values=self.values[:n])


def order_points(ps: PointSet) -> PointSet:
    """Sort ascending by value; ties broken by ascending original index.

    The tie rule is what makes "the i-th ordered point comes from x_n"
    well defined when values coincide.
    """
    if ps.is_exact:
        keys = np.lexsort((ps.labels, ps.numerators))
        return PointSet(labels=ps.labels[keys], numerators=ps.numerators[keys],
                        denominator=ps.denominator)
    keys = np.lexsort((ps.labels, ps.values))
    return PointSet(labels=ps.labels[keys], values=ps.values[keys])


@dataclass(frozen=True)
class GapMultiset:
    """Sorted multiset of the N torus gaps of an N-point set.

    Entries are nonnegative and sum to exactly 1 (numerators sum to the
    denominator) for exact sets. Zero-length gaps from coincident points are
    legal members.
    """

    n: int
    numerators: np.ndarray | None = None
    denominator: int | None = None
    values: np.ndarray | None = None

    @property
    def is_exact(self) -> bool:
        return self.numerators is not None

    def float_gaps(self) -> np.ndarray:
        if self.is_exact:
            return self.numerators.astype(np.float64) / float(self.denominator)
        return self.values

    def rescaled(self) -> np.ndarray:
        """Gaps multiplied by N (the natural unit for spacing laws)."""
        return self.float_gaps() * float(self.n)

    def sum_fraction(self) -> Fraction:
        if not self.is_exact:
            raise GapLabError("gap multiset is not exact")
        return Fraction(int(self.numerators.sum(dtype=object)), self.denominator)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GapMultiset):
            return NotImplemented
        if self.n != other.n:
            return False
        if self.is_exact and other.is_exact:
            den = math.lcm(self.denominator, other.denominator)
            if den >= 1 << 63:
                raise GridMismatchError("incompatible grids: common denominator "
                                        "exceeds 64-bit capacity")
            a = self.numerators * np.int64(den // self.denominator)
            b = other.numerators * np.int64(den // other.denominator)
            return bool(np.array_equal(a, b))
        if not self.is_exact and not other.is_exact:
            return bool(np.array_equal(self.values, other.values))
        raise GridMismatchError("cannot compare exact with real gap multiset")

    def __hash__(self):
        raise TypeError("GapMultiset is not hashable")


def gaps(ps: PointSet) -> GapMultiset:
    """Torus gaps of a nonempty point set, sorted ascending, with multiplicity."""
    if ps.n == 0:
        raise GapLabError("empty point set")
    if ps.is_exact:
        v = np.sort(ps.numerators)
        out = np.empty(ps.n, dtype=np.int64)
        out[:-1] = v[1:] - v[:-1]
        out[-1] = ps.denominator - v[-1] + v[0]
        out.sort()
        return GapMultiset(n=ps.n, numerators=out, denominator=ps.denominator)
    v = np.sort(ps.values)
    out = np.empty(ps.n, dtype=np.float64)
    out[:-1] = v[1:] - v[:-1]
    out[-1] = 1.0 - v[-1] + v[0]
    out.sort()
    return GapMultiset(n=ps.n, values=out)


class SampledCdf(NamedTuple):
    """A CDF sampled on an explicit grid."""

    grid: np.ndarray
    probs: np.ndarray


def _exact_threshold(s: float, den: int, n: int) -> int:
    # Largest numerator with num/den <= s/n, computed without rounding.
    frac = Fraction(s)
    return (frac.numerator * den) // (frac.denominator * n)


def gap_cdf(ps: PointSet, s_grid: Iterable[float]) -> SampledCdf:
    """Empirical law of the rescaled gaps: fraction of gaps <= s/N per grid s.

    Exact point sets are counted with integer comparisons, so knife-edge
    thresholds never depend on floating-point rounding.
    """
    grid = np.asarray(list(s_grid), dtype=np.float64)
    if grid.size and grid.min() < 0:
        raise GapLabError("s values must be nonnegative")
    g = gaps(ps)
    probs = np.empty(grid.size, dtype=np.float64)
    if g.is_exact:
        nums = g.numerators
        for i, s in enumerate(grid):
            # Gap numerators never exceed the denominator, so clamping keeps
            # the comparison value inside int64 for any s.
            thresh = min(_exact_threshold(float(s), g.denominator, g.n),
                         g.denominator)
            probs[i] = np.searchsorted(nums, thresh, side="right") / g.n
    else:
        vals = g.values
        for i, s in enumerate(grid):
            probs[i] = np.searchsorted(vals, s / g.n, side="right") / g.n
    return SampledCdf(grid=grid, probs=probs)


def reference_cdf(kind: str, s):
    """Reference laws for rescaled gaps on s >= 0.

    exponential: 1 - e^-s, the i.i.d. (Poissonian) spacing law.
    gamma2:      1 - (1+s)e^-s, the law of the sorted-gap partial-sum array.
    uniform:     min(s, 1), the rescaled-gap law of the equally spaced set.
    """
    arr = np.asarray(s, dtype=np.float64)
    if np.any(arr < 0):
        raise GapLabError("s must be nonnegative")
    if kind == "exponential":
        out = 1.0 - np.exp(-arr)
    elif kind == "gamma2":
        out = 1.0 - (1.0 + arr) * np.exp(-arr)
    elif kind == "uniform":
        out = np.minimum(arr, 1.0)
    else:
        raise GapLabError(f"unknown reference kind: {kind!r}")
    return float(out) if np.isscalar(s) else out


def star_discrepancy(ps: PointSet) -> float:
    """Sup-norm distance between the empirical CDF and the uniform CDF.

    Uses the classical closed form over the ordered points:
    max_i max(i/N - x_(i), x_(i) - (i-1)/N).
    """
    if ps.n == 0:
        raise GapLabError("empty point set")
    x = np.sort(ps.float_values())
    n = ps.n
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(np.maximum(i / n - x, x - (i - 1) / n).max())


def _close_pair_count(sorted_keys: np.ndarray, radius, period) -> int:
    # Unordered pairs i<j with circular distance <= radius (radius < period/2).
    n = sorted_keys.size
    idx = np.arange(n)
    forward = np.searchsorted(sorted_keys, sorted_keys + radius, side="right") - idx - 1
    backward = n - np.searchsorted(sorted_keys, sorted_keys + (period - radius),
                                   side="left")
    return int(forward.sum()) + int(backward.sum())


def pair_correlation(ps: PointSet, s: float) -> float:
    """Pair-counting statistic (1/N) #{m != n : torus-dist(x_m, x_n) <= s/N}.

    Counts ordered pairs; tends to 2s for sequences with Poissonian pair
    correlations. Exact sets are counted in integer arithmetic.
    """
    if ps.n < 2:
        raise GapLabError("pair correlation needs at least 2 points")
    if s < 0:
        raise GapLabError("s must be nonnegative")
    n = ps.n
    # Windowed key arithmetic needs num + den to stay inside int64.
    if ps.is_exact and 2 * ps.denominator < 1 << 63:
        den = ps.denominator
        radius = _exact_threshold(float(s), den, n)
        if 2 * radius >= den:
            return float(n - 1)
        keys = np.sort(ps.numerators)
        unordered = _close_pair_count(keys, np.int64(radius), np.int64(den))
    else:
        radius = s / n
        if 2.0 * radius >= 1.0:
            return float(n - 1)
        keys = np.sort(ps.float_values())
        unordered = _close_pair_count(keys, radius, 1.0)
    return 2.0 * unordered / n


def empirical_cdf(ps: PointSet, x: float) -> float:
    """Fraction of points <= x, for 0 <= x <= 1."""
    if not 0.0 <= x <= 1.0:
        raise GapLabError("x outside [0, 1]")
    if ps.is_exact:
        frac = Fraction(x)
        thresh = (frac.numerator * ps.denominator) // frac.denominator
        count = int(np.count_nonzero(ps.numerators <= thresh))
    else:
        count = int(np.count_nonzero(ps.values <= x))
    return count / ps.n


def ks_distance(f: SampledCdf, g: SampledCdf) -> float:
    """Sup of |f - g| over a shared sampling grid."""
    if f.grid.shape != g.grid.shape or not np.array_equal(f.grid, g.grid):
        raise GridMismatchError("sampled CDFs use different grids")
    if f.grid.size == 0:
        return 0.0
    return float(np.abs(f.probs - g.probs).max())


def default_s_grid(s_max: float = 5.0, steps: int = 500) -> np.ndarray:
    """Default threshold grid [0, s_max] covering >99% of the exponential mass."""
    return np.linspace(0.0, s_max, steps + 1)


def empirical_cdf_on_grid(ps: PointSet, x_grid) -> SampledCdf:
    """Empirical point CDF sampled on an x grid in [0, 1]."""
    grid = np.asarray(x_grid, dtype=np.float64)
    vals = np.sort(ps.float_values())
    probs = np.searchsorted(vals, grid, side="right") / ps.n
    return SampledCdf(grid=grid, probs=probs)
