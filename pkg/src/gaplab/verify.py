"""Whole-run verification: replay a recorded run and check every exact identity.

The verifier trusts only the raw variate column: it re-snaps the variates,
rebuilds every stage's classes and swap map, replays the biased and companion
sequences, and compares them entry by entry against the recorded columns. On
top of that it checks the exact gap-multiset identity at the requested
checkpoints (reporting the smallest failing prefix length), the per-stage
midpoint decomposition as an integer identity, and assembles the moment
comparison table.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .construction import (StageSchedule, construct,
                           run_stages_from_snapped, snap_to_stage_grids)
from .gapstats import (GapLabError, PointSet, empirical_cdf_on_grid, gaps,
                       ks_distance)
from .io import SCHEMA_VERSION, RunTable, run_table_of
from .rng import UNIT_DEN
from .structure import MomentUndefinedError, moment_functional

_ENV_THREADS = "GAPLAB_THREADS"


def worker_count(n_jobs: int) -> int:
    """Worker cap: GAPLAB_THREADS if set, else the CPU count."""
    raw = os.environ.get(_ENV_THREADS)
    if raw is not None:
        try:
            cap = int(raw)
        except ValueError:
            raise GapLabError(f"{_ENV_THREADS} must be an integer") from None
        if cap < 1:
            raise GapLabError(f"{_ENV_THREADS} must be positive")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_jobs))


def default_checkpoints(schedule: StageSchedule) -> list[int]:
    return [2 * schedule.size(k) for k in range(1, schedule.depth + 1)]


def _check(name: str, ok: bool, **details) -> dict:
    entry = {"name": name, "pass": bool(ok)}
    entry.update(details)
    return entry


def _u53_from_y(y: np.ndarray) -> np.ndarray:
    # Variates are dyadic with denominator 2^53, so the scaling is exact.
    u = y * float(UNIT_DEN)
    if np.any(u != np.floor(u)) or np.any((u < 0) | (u >= UNIT_DEN)):
        raise GapLabError("variate column is not 53-bit dyadic")
    return u.astype(np.uint64)


def verify_table(table: RunTable, schedule: StageSchedule,
                 checkpoints: list[int] | None = None,
                 moment_powers: tuple[int, ...] = (1, 2, 3)) -> dict:
    """Verify one recorded run table against the schedule. Returns the report."""
    schedule.check_capacity()
    checks: list[dict] = []
    report: dict = {"schema_version": SCHEMA_VERSION, "kind": "run-verification",
                    "schedule": list(schedule.stages), "checks": checks}

    if table.n_max != schedule.n_max:
        checks.append(_check("shape", False,
                             expected_rows=schedule.n_max, rows=table.n_max))
        report["overall_pass"] = False
        return report

    u53 = _u53_from_y(table.y)
    ytilde, den_per_n = snap_to_stage_grids(u53, schedule)
    snap_ok = np.array_equal(ytilde, table.ytilde_num)
    den_ok = np.array_equal(den_per_n, table.den)
    checks.append(_check("discretization", snap_ok and den_ok,
                         first_bad_n=_first_mismatch(ytilde, table.ytilde_num)))

    x, z, maps, tables, stats = run_stages_from_snapped(
        table.ytilde_num, table.den, schedule)
    checks.append(_check("replay_x", bool(np.array_equal(x, table.x_num)),
                         first_bad_n=_first_mismatch(x, table.x_num)))
    checks.append(_check("replay_z", bool(np.array_equal(z, table.z_num)),
                         first_bad_n=_first_mismatch(z, table.z_num)))

    if checkpoints is None:
        checkpoints = default_checkpoints(schedule)
    bad_checkpoints = []
    for n in sorted(checkpoints):
        if not 1 <= n <= schedule.n_max:
            raise GapLabError(f"checkpoint {n} out of range 1..{schedule.n_max}")
        if not _gaps_equal(table, schedule, n):
            bad_checkpoints.append(int(n))
    checks.append(_check("gap_multiset", not bad_checkpoints,
                         checkpoints=[int(n) for n in sorted(checkpoints)],
                         first_failing_n=(bad_checkpoints[0]
                                          if bad_checkpoints else None)))

    stage_rows = []
    decomposition_ok = True
    for st in stats:
        identity = (st.left_count == st.first_half_below
                    + st.second_ytilde_below + st.swapped_count)
        literal_form = (st.midpoint_ties == 0
                        and st.first_half_below == st.stage_size // 2 - 1)
        decomposition_ok = decomposition_ok and identity
        stage_rows.append({
            "k": st.k, "stage_size": st.stage_size,
            "midpoint": str(st.midpoint),
            "left_fraction": st.left_fraction,
            "swapped_count": st.swapped_count,
            "first_half_below": st.first_half_below,
            "second_ytilde_below": st.second_ytilde_below,
            "left_count": st.left_count,
            "midpoint_ties": st.midpoint_ties,
            "decomposition_identity": identity,
            "tie_free_form": literal_form,
        })
    checks.append(_check("bias_decomposition", decomposition_ok))
    report["stages"] = stage_rows

    report["moments"] = _moment_table(table, schedule, moment_powers)
    moment_ok = all(row.get("equal", True) for row in report["moments"])
    checks.append(_check("moment_agreement", moment_ok))

    grid = np.linspace(0.0, 1.0, 1001)
    zcdf = empirical_cdf_on_grid(_column_points(table, schedule, "z"), grid)
    ycdf = empirical_cdf_on_grid(_column_points(table, schedule, "ytilde"), grid)
    report["ks_z_vs_snapped"] = ks_distance(zcdf, ycdf)
    report["final_left_fraction"] = stage_rows[-1]["left_fraction"]

    report["overall_pass"] = all(c["pass"] for c in checks)
    return report


def _first_mismatch(a: np.ndarray, b: np.ndarray) -> int | None:
    bad = np.flatnonzero(a != b)
    return int(bad[0]) + 1 if bad.size else None


def _column_points(table: RunTable, schedule: StageSchedule, column: str,
                   n: int | None = None) -> PointSet:
    nums = {"x": table.x_num, "z": table.z_num,
            "ytilde": table.ytilde_num}[column]
    n = table.n_max if n is None else n
    den = schedule.grid_denominator(schedule.stage_of(n))
    return PointSet.exact(nums[:n] * (den // table.den[:n]), den)


def _gaps_equal(table: RunTable, schedule: StageSchedule, n: int) -> bool:
    return gaps(_column_points(table, schedule, "x", n)) == \
        gaps(_column_points(table, schedule, "z", n))


def _moment_table(table: RunTable, schedule: StageSchedule,
                  powers: tuple[int, ...]) -> list[dict]:
    """Side-by-side moment reports for the x and z prefixes.

    The comparison pins the coarse stage to the first boundary, where the two
    prefixes are literally the same points; with coincident coarse points the
    functional is undefined and reported as skipped.
    """
    coarse = schedule.size(1)
    fine = min(schedule.size(min(2, schedule.depth)) if schedule.depth > 1
               else 2 * coarse, table.n_max)
    rows: list[dict] = []
    xp = _column_points(table, schedule, "x", fine)
    zp = _column_points(table, schedule, "z", fine)
    for k in powers:
        try:
            mx = moment_functional(xp, coarse, fine, k)
            mz = moment_functional(zp, coarse, fine, k)
        except MomentUndefinedError as exc:
            rows.append({"coarse": coarse, "fine": fine, "k": k,
                         "skipped": str(exc)})
            continue
        rows.append({
            "coarse": coarse, "fine": fine, "k": k,
            "x_literal": mx.literal_float, "x_corrected": mx.corrected_float,
            "z_literal": mz.literal_float, "z_corrected": mz.corrected_float,
            "equal": mx.literal == mz.literal and mx.corrected == mz.corrected,
        })
    return rows


def verify_seed(seed: int, schedule: StageSchedule,
                checkpoints: list[int] | None = None) -> dict:
    """Construct a fresh run for the seed and verify its table."""
    run = construct(seed, schedule)
    report = verify_table(run_table_of(run), schedule, checkpoints)
    report["seed"] = seed
    return report


def _verify_seed_job(args) -> dict:
    seed, stages, checkpoints = args
    return verify_seed(seed, StageSchedule.of(*stages), checkpoints)


def verify_seed_sweep(seeds: list[int], schedule: StageSchedule,
                      checkpoints: list[int] | None = None) -> dict:
    """Verify several seeds, fanning out over independent worker processes."""
    workers = worker_count(len(seeds))
    jobs = [(seed, schedule.stages, checkpoints) for seed in seeds]
    if workers == 1:
        runs = [_verify_seed_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_verify_seed_job, jobs))
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "seed-sweep-verification",
        "schedule": list(schedule.stages),
        "seeds": list(seeds),
        "runs": runs,
        "overall_pass": all(r["overall_pass"] for r in runs),
    }
