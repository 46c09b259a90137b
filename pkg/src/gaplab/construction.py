"""Recursive interval-swap construction of a biased sequence with unchanged gaps.

The construction runs in stages. Stage k owns the indices 2*N[k-1] < n <= 2*N[k]
of a schedule (N[1], ..., N[K]). Each index draws one uniform variate y_n,
which is snapped down onto the stage grid of 10^k * N[k] equal cells. At the
stage boundary the first N[k] points are frozen, their consecutive gaps are
classified by exact cell width, and a piecewise translation is built that
exchanges, per width, empty gap intervals from the left half of the ordered
prefix against occupied ones from the right half. Applying that map to the
second half of the stage shifts mass toward the left end of [0, 1) while the
multiset of gaps stays exactly the same at every prefix length.

Two companion sequences are maintained:

* ``x``: snapped variates with the current stage's swap applied to the
  stage's second half. This is the biased (non-equidistributed) sequence.
* ``z``: snapped variates pushed through all *earlier* stages' swaps
  (innermost = latest stage). This sequence stays distributed like the
  snapped variates but has the same gap multiset as ``x`` at every prefix.

Everything is exact: points are int64 numerators over the stage denominator,
and all swap arithmetic is integer translation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .gapstats import (GapLabError, GridMismatchError, GridPoint, PointSet,
                       gaps)
from .rng import UNIT_DEN, SeededStream

#: Desk-scale default: exact arithmetic fits comfortably in 64 bits and a
#: full run takes seconds.
DEFAULT_SCHEDULE = (100, 10_000, 1_000_000)

_INT64_MAX = (1 << 63) - 1


class ScheduleError(GapLabError):
    """A stage schedule violates its structural rules."""


@dataclass(frozen=True)
class ScheduleViolation:
    """First violated schedule rule, for reporting."""

    code: str
    message: str

    def __str__(self) -> str:
        return self.message


def validate_schedule(stages) -> ScheduleViolation | None:
    """Check the schedule rules, returning the first violation or None.

    Rules: all entries positive; the first entry even; each entry divides
    the next; and each ratio N[k+1]/N[k] is at least k+1 (a finite-scale
    witness that the schedule grows superlinearly).
    """
    stages = list(stages)
    if not stages:
        raise GapLabError("empty schedule")
    for k, n in enumerate(stages, start=1):
        if int(n) <= 0:
            return ScheduleViolation("positivity", f"N_{k} = {n} is not positive")
    if stages[0] % 2 != 0:
        return ScheduleViolation("parity", f"N_1 odd: {stages[0]}")
    for k in range(1, len(stages)):
        if stages[k] % stages[k - 1] != 0:
            return ScheduleViolation(
                "divisibility",
                f"divisibility: N_{k + 1} = {stages[k]} is not a multiple of "
                f"N_{k} = {stages[k - 1]}")
    for k in range(1, len(stages)):
        if stages[k] < (k + 1) * stages[k - 1]:
            return ScheduleViolation(
                "growth",
                f"growth: N_{k + 1}/N_{k} = {stages[k]}/{stages[k - 1]} "
                f"is below {k + 1}")
    return None


@dataclass(frozen=True)
class StageSchedule:
    """Stage sizes (N_1, ..., N_K), with the convention N_0 = 0."""

    stages: tuple[int, ...]

    def __post_init__(self):
        violation = validate_schedule(self.stages)
        if violation is not None:
            raise ScheduleError(str(violation))

    @staticmethod
    def of(*stages: int) -> "StageSchedule":
        return StageSchedule(tuple(int(n) for n in stages))

    @property
    def depth(self) -> int:
        return len(self.stages)

    def size(self, k: int) -> int:
        """N_k, with N_0 = 0."""
        if k == 0:
            return 0
        if not 1 <= k <= self.depth:
            raise GapLabError(f"stage {k} out of range 1..{self.depth}")
        return self.stages[k - 1]

    @property
    def n_max(self) -> int:
        """Total number of indices covered: 2 * N_K."""
        return 2 * self.stages[-1]

    def grid_denominator(self, k: int) -> int:
        """Cell count 10^k * N_k of the stage-k grid."""
        den = 10 ** k * self.size(k)
        if den > _INT64_MAX:
            raise ScheduleError(
                f"stage {k}: grid denominator 10^{k} * {self.size(k)} "
                f"exceeds 64-bit capacity")
        return den

    def check_capacity(self) -> None:
        for k in range(1, self.depth + 1):
            self.grid_denominator(k)

    def stage_of(self, n: int) -> int:
        """The unique k with 2*N_{k-1} < n <= 2*N_k."""
        if not 1 <= n <= self.n_max:
            raise GapLabError(f"index {n} out of range 1..{self.n_max}")
        for k in range(1, self.depth + 1):
            if n <= 2 * self.size(k):
                return k
        raise AssertionError("unreachable")


def stage_of(n: int, schedule: StageSchedule) -> int:
    return schedule.stage_of(n)


def _floor_scaled(u53: np.ndarray, den: int) -> np.ndarray:
    """Exact floor(den * u / 2^53) for uint64 numerators u < 2^53.

    The fast path splits u into 27 high and 26 low bits so every product
    stays below 2^63; beyond that, falls back to Python integers.
    """
    if den < (1 << 36):
        d = np.uint64(den)
        hi = u53 >> np.uint64(26)
        lo = u53 & np.uint64((1 << 26) - 1)
        acc = d * hi + ((d * lo) >> np.uint64(26))
        return (acc >> np.uint64(27)).astype(np.int64)
    return np.array([(den * int(u)) >> 53 for u in u53], dtype=np.int64)


def discretize(y: float, k: int, schedule: StageSchedule) -> GridPoint:
    """Snap y down onto the stage-k grid: floor(D_k * y) / D_k, exactly."""
    if not 0.0 <= y < 1.0:
        raise GapLabError("y outside [0, 1)")
    den = schedule.grid_denominator(k)
    p, q = float(y).as_integer_ratio()
    return GridPoint(num=(den * p) // q, den=den)


@dataclass(frozen=True)
class GapClass:
    """All ordered-gap indices of one exact cell width at a stage boundary.

    Indices are 1-based positions i of the ordered prefix: the gap interval i
    spans [v_i, v_{i+1}). "Left" means i < N/2, "right" means i >= N/2. The
    wrap gap (i = N) never belongs to a class, because the swap maps act on
    [0, 1) and a wrap interval would cross 1.
    """

    width_cells: int
    left_members: np.ndarray
    right_members: np.ndarray
    empty_left: np.ndarray
    occupied_right: np.ndarray
    points_in_left: int
    points_in_right: int

    @property
    def n_empty_left(self) -> int:
        return int(self.empty_left.size)

    @property
    def n_occupied_right(self) -> int:
        return int(self.occupied_right.size)

    @property
    def swap_pairs(self) -> int:
        return min(self.n_empty_left, self.n_occupied_right)


@dataclass(frozen=True)
class GapClassTable:
    """Gap classes of a stage boundary plus the ordered prefix that defines them."""

    stage_size: int
    grid_den: int
    sorted_nums: np.ndarray
    classes: dict[int, GapClass]

    def class_size(self, width_cells: int) -> int:
        c = self.classes.get(width_cells)
        if c is None:
            return 0
        return int(c.left_members.size + c.right_members.size)

    def counts(self, width_cells: int) -> tuple[int, int]:
        """(empty-left, occupied-right) counts of one class; zeros if absent."""
        c = self.classes.get(width_cells)
        if c is None:
            return 0, 0
        return c.n_empty_left, c.n_occupied_right


def gap_classes(prefix: PointSet, second_half: PointSet,
                grid_den: int) -> GapClassTable:
    """Classify the non-wrap gaps of the boundary prefix by exact cell width.

    ``prefix`` holds the first N points (the frozen boundary configuration),
    ``second_half`` the N snapped points of the stage's second half whose
    interval occupancy decides which gap intervals are swappable. Both must
    live on grids dividing ``grid_den``.
    """
    if not (prefix.is_exact and second_half.is_exact):
        raise GapLabError("gap classes need exact points")
    n = prefix.n
    if n == 0 or n % 2 != 0:
        raise GapLabError(f"boundary prefix size {n} must be even and positive")
    if second_half.n != n:
        raise GapLabError(
            f"second half has {second_half.n} points, expected {n}")
    v = np.sort(prefix.rescaled_numerators(grid_den))
    w = np.sort(second_half.rescaled_numerators(grid_den))

    widths = v[1:] - v[:-1]
    occupancy = (np.searchsorted(w, v[1:], side="left")
                 - np.searchsorted(w, v[:-1], side="left"))
    ordered_index = np.arange(1, n, dtype=np.int64)
    half = n // 2

    classes: dict[int, GapClass] = {}
    order = np.argsort(widths, kind="stable")
    sorted_widths = widths[order]
    boundaries = np.flatnonzero(np.diff(sorted_widths)) + 1
    for group in np.split(order, boundaries):
        width = int(widths[group[0]])
        members = np.sort(ordered_index[group])
        occ = occupancy[members - 1]
        is_left = members < half
        left = members[is_left]
        right = members[~is_left]
        left_occ = occ[is_left]
        right_occ = occ[~is_left]
        classes[width] = GapClass(
            width_cells=width,
            left_members=left,
            right_members=right,
            empty_left=left[left_occ == 0],
            occupied_right=right[right_occ > 0],
            points_in_left=int(left_occ.sum()),
            points_in_right=int(right_occ.sum()),
        )
    return GapClassTable(stage_size=n, grid_den=grid_den, sorted_nums=v,
                         classes=classes)


@dataclass(frozen=True)
class SwapMap:
    """Piecewise translation swapping paired equal-width grid intervals.

    Pairs are [left, left+width) <-> [right, right+width); everything else is
    fixed. All listed intervals are pairwise disjoint, so the map is an
    involution and a bijection of [0, 1), and applying the per-width pieces
    in any order gives the same map.
    """

    grid_den: int
    left_starts: np.ndarray
    right_starts: np.ndarray
    widths: np.ndarray
    _starts: np.ndarray = field(default=None, repr=False, compare=False)
    _ends: np.ndarray = field(default=None, repr=False, compare=False)
    _shifts: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        left = np.asarray(self.left_starts, dtype=np.int64)
        right = np.asarray(self.right_starts, dtype=np.int64)
        widths = np.asarray(self.widths, dtype=np.int64)
        if not (left.size == right.size == widths.size):
            raise GapLabError("swap pair arrays must have equal lengths")
        if widths.size and widths.min() <= 0:
            raise GapLabError("swap widths must be positive")
        starts = np.concatenate([left, right])
        shifts = np.concatenate([right - left, left - right])
        w2 = np.concatenate([widths, widths])
        order = np.argsort(starts, kind="stable")
        starts, shifts, w2 = starts[order], shifts[order], w2[order]
        ends = starts + w2
        if starts.size:
            if starts[0] < 0 or ends[-1] > self.grid_den:
                raise GapLabError("swap interval outside [0, 1)")
            if np.any(starts[1:] < ends[:-1]):
                raise GapLabError("overlapping swap intervals")
        object.__setattr__(self, "left_starts", left)
        object.__setattr__(self, "right_starts", right)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "_starts", starts)
        object.__setattr__(self, "_ends", ends)
        object.__setattr__(self, "_shifts", shifts)

    @staticmethod
    def identity(grid_den: int) -> "SwapMap":
        empty = np.array([], dtype=np.int64)
        return SwapMap(grid_den=grid_den, left_starts=empty, right_starts=empty,
                       widths=empty)

    @property
    def pair_count(self) -> int:
        return int(self.widths.size)

    @property
    def is_identity(self) -> bool:
        return self.pair_count == 0

    def apply_to_numerators(self, nums: np.ndarray, den: int) -> np.ndarray:
        """Apply the map to numerators over a refining denominator."""
        if den % self.grid_den != 0:
            raise GridMismatchError(
                f"incompatible denominators: map grid {self.grid_den} does not "
                f"divide {den}")
        factor = den // self.grid_den
        out = np.array(nums, dtype=np.int64, copy=True)
        if self.is_identity or out.size == 0:
            return out
        starts = self._starts * factor
        idx = np.searchsorted(starts, out, side="right") - 1
        safe = np.maximum(idx, 0)
        inside = (idx >= 0) & (out < self._ends[safe] * factor)
        out[inside] += self._shifts[safe[inside]] * factor
        return out

    def apply(self, p: GridPoint) -> GridPoint:
        """Apply the map to one exact point (involution on its grid)."""
        num = self.apply_to_numerators(np.array([p.num], dtype=np.int64), p.den)
        return GridPoint(num=int(num[0]), den=p.den)


def build_swap_map(table: GapClassTable) -> SwapMap:
    """Pair, per positive width, the first empty-left intervals (ascending
    ordered index) with the first occupied-right intervals (ascending)."""
    v = table.sorted_nums
    left_starts: list[np.ndarray] = []
    right_starts: list[np.ndarray] = []
    widths: list[np.ndarray] = []
    for width in sorted(table.classes):
        if width == 0:
            continue
        c = table.classes[width]
        pairs = c.swap_pairs
        if pairs == 0:
            continue
        li = c.empty_left[:pairs]
        ri = c.occupied_right[:pairs]
        left_starts.append(v[li - 1])
        right_starts.append(v[ri - 1])
        widths.append(np.full(pairs, width, dtype=np.int64))
    if not widths:
        return SwapMap.identity(table.grid_den)
    return SwapMap(grid_den=table.grid_den,
                   left_starts=np.concatenate(left_starts),
                   right_starts=np.concatenate(right_starts),
                   widths=np.concatenate(widths))


def apply_swap(m: SwapMap, p: GridPoint) -> GridPoint:
    """Translate p to its partner interval if it lies in one, else return it."""
    return m.apply(p)


@dataclass(frozen=True)
class StageStats:
    """Midpoint and left-half bookkeeping recorded at the end of a stage.

    ``midpoint`` is the (N_k/2)-th ordered point of the boundary prefix.
    ``left_count`` counts all 2*N_k points below it, which decomposes exactly
    as first_half_below + second_ytilde_below + swapped_count: swapped points
    always travel from at-or-above the midpoint to strictly below it.
    ``first_half_below`` equals N_k/2 - 1 - midpoint_ties, where
    midpoint_ties counts ordered prefix points below position N_k/2 that
    coincide with the midpoint value.
    """

    k: int
    stage_size: int
    midpoint: GridPoint
    swapped_count: int
    first_half_below: int
    second_ytilde_below: int
    left_count: int
    midpoint_ties: int

    @property
    def left_fraction(self) -> float:
        return self.left_count / (2 * self.stage_size)


@dataclass(frozen=True)
class BiasReport:
    """Equidistribution-failure witness for one stage."""

    k: int
    midpoint: GridPoint
    left_fraction: float
    swapped_count: int
    stats: StageStats


@dataclass(frozen=True)
class ConstructionRun:
    """Full record of one seeded run: per-index values, per-stage maps and stats."""

    schedule: StageSchedule
    seed: int
    y: np.ndarray
    ytilde_num: np.ndarray
    x_num: np.ndarray
    z_num: np.ndarray
    stage_den: np.ndarray
    swap_maps: tuple[SwapMap, ...]
    tables: tuple[GapClassTable, ...]
    stage_stats: tuple[StageStats, ...]

    @property
    def n_max(self) -> int:
        return int(self.y.size)

    def _points(self, nums: np.ndarray, n: int) -> PointSet:
        if not 1 <= n <= self.n_max:
            raise GapLabError(f"prefix length {n} out of range 1..{self.n_max}")
        den = self.schedule.grid_denominator(self.schedule.stage_of(n))
        factors = den // self.stage_den[:n]
        return PointSet.exact(nums[:n] * factors, den)

    def x_points(self, n: int) -> PointSet:
        return self._points(self.x_num, n)

    def z_points(self, n: int) -> PointSet:
        return self._points(self.z_num, n)

    def ytilde_points(self, n: int) -> PointSet:
        return self._points(self.ytilde_num, n)

    def y_points(self, n: int) -> PointSet:
        return PointSet.real(self.y[:n])


def snap_to_stage_grids(u53: np.ndarray,
                        schedule: StageSchedule) -> tuple[np.ndarray, np.ndarray]:
    """Snap 53-bit variate numerators onto each index's stage grid.

    Returns (snapped numerators, per-index grid denominators).
    """
    n_max = u53.size
    ytilde = np.zeros(n_max, dtype=np.int64)
    den_per_n = np.zeros(n_max, dtype=np.int64)
    for k in range(1, schedule.depth + 1):
        lo = min(2 * schedule.size(k - 1), n_max)
        hi = min(2 * schedule.size(k), n_max)
        if lo >= hi:
            break
        den = schedule.grid_denominator(k)
        ytilde[lo:hi] = _floor_scaled(u53[lo:hi], den)
        den_per_n[lo:hi] = den
    return ytilde, den_per_n


def run_stages_from_snapped(ytilde: np.ndarray, den_per_n: np.ndarray,
                            schedule: StageSchedule):
    """Core stage recursion on already-snapped points.

    Returns (x, z, swap maps, class tables, stage stats). Used both by
    construct() and by the verifier, which replays a run table.
    """
    n_max = schedule.n_max
    if ytilde.size != n_max:
        raise GapLabError(
            f"expected {n_max} snapped points, found {ytilde.size}")
    x = np.zeros(n_max, dtype=np.int64)
    z = np.zeros(n_max, dtype=np.int64)
    maps: list[SwapMap] = []
    tables: list[GapClassTable] = []
    stats: list[StageStats] = []

    for k in range(1, schedule.depth + 1):
        lo = 2 * schedule.size(k - 1)
        mid = schedule.size(k)
        hi = 2 * mid
        den = schedule.grid_denominator(k)
        if np.any(den_per_n[lo:hi] != den):
            raise GapLabError(f"stage {k}: rows not on the stage grid")

        x[lo:mid] = ytilde[lo:mid]
        prefix = PointSet.exact(x[:mid] * (den // den_per_n[:mid]), den)
        second = PointSet.exact(ytilde[mid:hi], den)
        table = gap_classes(prefix, second, den)
        smap = build_swap_map(table)
        x[mid:hi] = smap.apply_to_numerators(ytilde[mid:hi], den)

        z[lo:hi] = ytilde[lo:hi]
        for j in range(k - 1, 0, -1):
            z[lo:hi] = maps[j - 1].apply_to_numerators(z[lo:hi], den)

        stats.append(_stage_stats(k, mid, table.sorted_nums, x, ytilde,
                                  den_per_n, den))
        maps.append(smap)
        tables.append(table)
    return x, z, tuple(maps), tuple(tables), tuple(stats)


def _stage_stats(k: int, mid: int, sorted_prefix: np.ndarray, x: np.ndarray,
                 ytilde: np.ndarray, den_per_n: np.ndarray,
                 den: int) -> StageStats:
    hi = 2 * mid
    m_num = int(sorted_prefix[mid // 2 - 1])
    first_half_below = int(np.searchsorted(sorted_prefix, m_num, side="left"))
    swapped = int(np.count_nonzero(x[mid:hi] != ytilde[mid:hi]))
    second_below = int(np.count_nonzero(ytilde[mid:hi] < m_num))
    left_count = int(np.count_nonzero(
        x[:hi] * (den // den_per_n[:hi]) < m_num))
    return StageStats(
        k=k, stage_size=mid, midpoint=GridPoint(m_num, den),
        swapped_count=swapped, first_half_below=first_half_below,
        second_ytilde_below=second_below, left_count=left_count,
        midpoint_ties=(mid // 2 - 1) - first_half_below,
    )


def construct(seed: int, schedule: StageSchedule) -> ConstructionRun:
    """Run the full stage recursion for all indices n <= 2*N_K."""
    schedule.check_capacity()
    stream = SeededStream(seed)
    u53 = stream.raw53_block(schedule.n_max)
    y = u53.astype(np.float64) / float(UNIT_DEN)
    ytilde, den_per_n = snap_to_stage_grids(u53, schedule)
    x, z, maps, tables, stats = run_stages_from_snapped(ytilde, den_per_n,
                                                        schedule)
    return ConstructionRun(schedule=schedule, seed=seed, y=y, ytilde_num=ytilde,
                           x_num=x, z_num=z, stage_den=den_per_n,
                           swap_maps=maps, tables=tables, stage_stats=stats)


def midpoint_and_bias(run: ConstructionRun, k: int) -> BiasReport:
    """Midpoint, left-half fraction at 2*N_k, and number of swapped points."""
    if not 1 <= k <= run.schedule.depth:
        raise GapLabError(f"stage {k} out of range 1..{run.schedule.depth}")
    st = run.stage_stats[k - 1]
    return BiasReport(k=k, midpoint=st.midpoint,
                      left_fraction=st.left_fraction,
                      swapped_count=st.swapped_count, stats=st)


@dataclass(frozen=True)
class RnModel:
    """Grid-valued model sequence r with its uniform companion t = r + q.

    Per index, r is uniform on the stage grid and q = t - r is uniform on one
    grid cell, held exactly as a 53-bit numerator so the cell bound can be
    checked without rounding.
    """

    schedule: StageSchedule
    seed: int
    r: PointSet
    r_num: np.ndarray
    q_raw: np.ndarray
    stage_den: np.ndarray

    def t_values(self) -> np.ndarray:
        frac = self.q_raw.astype(np.float64) / float(UNIT_DEN)
        return (self.r_num.astype(np.float64) + frac) / self.stage_den.astype(np.float64)

    def q_fraction(self, n: int) -> Fraction:
        """Exact q_n = t_n - r_n as a rational (1-based n)."""
        return Fraction(int(self.q_raw[n - 1]),
                        UNIT_DEN * int(self.stage_den[n - 1]))


def rn_model(seed: int, schedule: StageSchedule, n_max: int) -> RnModel:
    """Draw the (r, t) model: r on the stage grid, t uniform, 0 <= t-r < cell."""
    if not 1 <= n_max <= schedule.n_max:
        raise GapLabError(f"n_max {n_max} out of range 1..{schedule.n_max}")
    schedule.check_capacity()
    stream = SeededStream(seed)
    u = stream.raw53_block(2 * n_max)
    u_r, u_q = u[0::2], u[1::2]

    r = np.zeros(n_max, dtype=np.int64)
    dens = np.zeros(n_max, dtype=np.int64)
    for k in range(1, schedule.depth + 1):
        lo = min(2 * schedule.size(k - 1), n_max)
        hi = min(2 * schedule.size(k), n_max)
        if lo >= hi:
            break
        den = schedule.grid_denominator(k)
        r[lo:hi] = _floor_scaled(u_r[lo:hi], den)
        dens[lo:hi] = den

    common = schedule.grid_denominator(schedule.stage_of(n_max))
    points = PointSet.exact(r * (common // dens), common)
    return RnModel(schedule=schedule, seed=seed, r=points, r_num=r,
                   q_raw=u_q.copy(), stage_den=dens)


def generate_rn(seed: int, schedule: StageSchedule, n_max: int) -> PointSet:
    """The grid-valued model sequence alone (see rn_model for the companion)."""
    return rn_model(seed, schedule, n_max).r


def sorted_gap_array(base: PointSet, n: int) -> PointSet:
    """Row n of the sorted-gap triangular array: partial sums of the n sorted
    gaps of the base prefix. The final sum 1 is reduced to 0 on the torus, so
    the row's gap multiset equals the base prefix's exactly."""
    if n > base.n:
        raise GapLabError(f"row length {n} exceeds {base.n} base points")
    g = gaps(base.prefix(n))
    if g.is_exact:
        sums = np.cumsum(g.numerators)
        sums[-1] = 0
        return PointSet.exact(sums, g.denominator)
    sums = np.cumsum(g.values)
    sums[-1] = 0.0
    np.minimum(sums, np.nextafter(1.0, 0.0), out=sums)
    return PointSet.real(sums)


@dataclass(frozen=True)
class DiagnosticsRow:
    """Per-width diagnostic counters for one stage.

    ``s`` is the rescaled gap size width/10^k. ``block_class_size`` counts
    the width's gaps among the stage's own first-half points only (the
    fresh block); the remaining counters come from the full boundary prefix.
    ``doubled_condition`` is true when the doubled width 2w or 2w+1 has at
    least as many empty-left as occupied-right intervals. ``expected_band``
    brackets block_class_size within a factor 4 of e^-s * N_k/10^k, and
    ``doubled_band`` brackets one of the doubled classes within a factor 5
    of e^-2s * N_k/10^k.
    """

    width_cells: int
    s: float
    block_class_size: int
    left_size: int
    right_size: int
    n_empty_left: int
    n_occupied_right: int
    points_in_right: int
    doubled_condition: bool
    expected_band: bool
    doubled_band: bool


def stage_diagnostics(run: ConstructionRun, k: int, a: float,
                      b: float) -> list[DiagnosticsRow]:
    """Counters for every width w with 1/b <= w/10^k < 1/a at stage k."""
    if not 1 <= k <= run.schedule.depth:
        raise GapLabError(f"stage {k} out of range 1..{run.schedule.depth}")
    if not 0 < a < b:
        raise GapLabError("need 0 < a < b")
    scale = 10 ** k
    # Width range solved exactly: w/scale in [1/b, 1/a).
    lo_bound = Fraction(scale) / Fraction(b)
    hi_bound = Fraction(scale) / Fraction(a)
    lo = max(1, math.ceil(lo_bound))
    hi = int(hi_bound) if hi_bound.denominator == 1 else math.ceil(hi_bound)
    widths = range(lo, hi)

    n_k = run.schedule.size(k)
    block_lo = 2 * run.schedule.size(k - 1)
    block = PointSet.exact(run.x_num[block_lo:n_k],
                           run.schedule.grid_denominator(k))
    block_gaps = gaps(block)
    cells, counts = np.unique(block_gaps.numerators, return_counts=True)
    block_hist = dict(zip(cells.tolist(), counts.tolist()))

    table = run.tables[k - 1]
    density = n_k / scale
    rows = []
    for w in widths:
        s = w / scale
        c = table.classes.get(w)
        left = int(c.left_members.size) if c else 0
        right = int(c.right_members.size) if c else 0
        mu, nu = table.counts(w)
        t_right = c.points_in_right if c else 0
        doubled = any(table.counts(j)[0] >= table.counts(j)[1]
                      for j in (2 * w, 2 * w + 1))
        mbar = block_hist.get(w, 0)
        center = math.exp(-s) * density
        band = center / 4 <= mbar <= 4 * center
        center2 = math.exp(-2 * s) * density
        dbl_band = any(center2 / 5 <= table.class_size(j) <= 5 * center2
                       for j in (2 * w, 2 * w + 1))
        rows.append(DiagnosticsRow(
            width_cells=w, s=s, block_class_size=int(mbar), left_size=left,
            right_size=right, n_empty_left=mu, n_occupied_right=nu,
            points_in_right=t_right, doubled_condition=doubled,
            expected_band=band, doubled_band=dbl_band))
    return rows
