"""Shared fixtures: cached desk-scale run summaries for the acceptance gate."""

from __future__ import annotations

import numpy as np
import pytest

import gaplab as gl

# Fixed seeds for the Monte Carlo acceptance criteria. Chosen once and frozen;
# all five were checked to be free of ordered-prefix ties at the midpoint
# rank, where the tie-free form of the left-count decomposition is asserted.
ACCEPTANCE_SEEDS = (1, 2, 3, 4, 5)
BASELINE_IID_SEEDS = (101, 102, 103, 104, 105)

CHECKPOINTS = (200, 20_000, 2_000_000)
N_INTERMEDIATE = 20


def intermediate_checkpoints(seed: int, n_max: int, count: int) -> list[int]:
    """Deterministic pseudo-random prefix lengths in [2, n_max]."""
    stream = gl.SeededStream(seed ^ 0xC0FFEE)
    out = set()
    while len(out) < count:
        out.add(2 + stream.next_raw53() % (n_max - 1))
    return sorted(out)


@pytest.fixture(scope="session")
def acceptance_summaries():
    """One pass over the five acceptance runs, reduced to small summaries."""
    schedule = gl.StageSchedule.of(*gl.DEFAULT_SCHEDULE)
    grid = gl.default_s_grid(5.0, 500)
    reference = gl.reference_cdf("exponential", grid)
    summaries = {}
    for seed in ACCEPTANCE_SEEDS:
        run = gl.construct(seed, schedule)
        n_max = run.n_max
        checks = sorted(set(CHECKPOINTS)
                        | set(intermediate_checkpoints(seed, n_max,
                                                       N_INTERMEDIATE)))
        multiset_ok = {n: gl.same_gap_multiset(run.x_points(n),
                                               run.z_points(n))
                       for n in checks}
        cdf = gl.gap_cdf(run.x_points(n_max), grid)
        stages = []
        for k in range(1, schedule.depth + 1):
            st = run.stage_stats[k - 1]
            stages.append({
                "k": k,
                "stage_size": st.stage_size,
                "left_fraction": st.left_fraction,
                "swapped_count": st.swapped_count,
                "left_count": st.left_count,
                "second_ytilde_below": st.second_ytilde_below,
                "first_half_below": st.first_half_below,
                "midpoint_ties": st.midpoint_ties,
            })
        diag = gl.stage_diagnostics(run, schedule.depth, 3.0, 20.0)
        summaries[seed] = {
            "multiset_ok": multiset_ok,
            "gap_law_sup": float(np.abs(cdf.probs - reference).max()),
            "stages": stages,
            "x_star_discrepancy": gl.star_discrepancy(run.x_points(n_max)),
            "diag_doubled_fraction": float(np.mean(
                [row.doubled_condition for row in diag])),
            "diag_expected_band_fraction": float(np.mean(
                [row.expected_band for row in diag])),
        }
        del run
    return summaries


@pytest.fixture(scope="session")
def iid_baseline_discrepancy():
    """Mean star discrepancy of i.i.d. sets at the acceptance size."""
    n = 2_000_000
    values = []
    for seed in BASELINE_IID_SEEDS:
        ps = gl.PointSet.exact(
            gl.SeededStream(seed).raw53_block(n).astype(np.int64),
            1 << 53)
        values.append(gl.star_discrepancy(ps))
    return float(np.mean(values))
