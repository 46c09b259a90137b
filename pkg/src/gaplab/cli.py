"""Command-line front end: reproducible experiments with CSV/JSON reports.

Subcommands: generate, gapcdf, discrepancy, paircorr, diagnostics, moments,
verify. Identical flags always produce byte-identical outputs. Exit codes:
0 success, 1 a verification reported failures, 2 bad usage or malformed input.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io as gio
from .construction import (DEFAULT_SCHEDULE, StageSchedule, construct,
                           midpoint_and_bias, rn_model, sorted_gap_array,
                           stage_diagnostics, validate_schedule)
from .gapstats import (GapLabError, PointSet, default_s_grid, gap_cdf,
                       pair_correlation, reference_cdf, star_discrepancy)
from .rng import MASK64, SeededStream, UNIT_DEN
from .structure import descendants, moment_functional
from .verify import verify_seed_sweep, verify_table

GENERATE_KINDS = ("iid", "rn", "construct-x", "construct-z",
                  "sorted-gap-array")


def _parse_schedule(text: str) -> StageSchedule:
    try:
        stages = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise GapLabError(f"cannot parse schedule {text!r}") from None
    violation = validate_schedule(stages)
    if violation is not None:
        raise GapLabError(f"invalid schedule: {violation}")
    return StageSchedule(stages)


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise GapLabError(f"cannot parse integer list {text!r}") from None


def _seed_type(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError(
            "seed must be a decimal unsigned 64-bit integer")
    return value


def _add_common(parser: argparse.ArgumentParser, *, seed=False, schedule=False,
                out=True, fmt=False, plot=False) -> None:
    if seed:
        parser.add_argument("--seed", type=_seed_type, default=0,
                            help="decimal 64-bit seed (default 0)")
    if schedule:
        parser.add_argument("--schedule", default=None,
                            help="comma-separated stage sizes N1,N2,...")
    if out:
        parser.add_argument("--out", required=True, help="output file path")
    if fmt:
        parser.add_argument("--format", choices=("csv", "json"), default="csv",
                            help="output format (default csv)")
    if plot:
        parser.add_argument("--plot", action="store_true",
                            help="also render a PNG figure next to the output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaplab",
        description="Spacing statistics and the gap-preserving interval-swap "
                    "construction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a points file")
    p.add_argument("--kind", choices=GENERATE_KINDS, required=True)
    p.add_argument("--n", type=int, default=None,
                   help="number of points (iid, rn, sorted-gap-array)")
    _add_common(p, seed=True, schedule=True)

    p = sub.add_parser("gapcdf", help="empirical law of the rescaled gaps")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--reference", default="exponential",
                   choices=("exponential", "gamma2", "uniform"))
    p.add_argument("--s-max", type=float, default=5.0)
    p.add_argument("--s-steps", type=int, default=500)
    _add_common(p, fmt=True, plot=True)

    p = sub.add_parser("discrepancy", help="star discrepancy of a points file")
    p.add_argument("--in", dest="input", required=True)
    _add_common(p, fmt=True, plot=True)

    p = sub.add_parser("paircorr", help="pair correlation statistic")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--s-max", type=float, default=5.0)
    p.add_argument("--s-steps", type=int, default=50)
    _add_common(p, fmt=True, plot=True)

    p = sub.add_parser("diagnostics",
                       help="per-width stage counters over a rescaled-gap band")
    p.add_argument("--k", type=int, required=True, help="stage index")
    p.add_argument("--band-a", type=float, required=True,
                   help="upper reciprocal bound: widths w satisfy w/10^k < 1/a")
    p.add_argument("--band-b", type=float, required=True,
                   help="lower reciprocal bound: widths w satisfy 1/b <= w/10^k")
    _add_common(p, seed=True, schedule=True, fmt=True)

    p = sub.add_parser("moments", help="descendant moment functional table")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--coarse", type=int, required=True, help="coarse stage M")
    p.add_argument("--fine", type=int, default=None,
                   help="fine stage N (default: all points)")
    p.add_argument("--powers", default="1,2,3,4",
                   help="comma-separated moment orders")
    p.add_argument("--dump-descendants", default=None,
                   help="also write the per-cell descendant counts CSV")
    _add_common(p, fmt=True, plot=True)

    p = sub.add_parser("verify", help="verify a recorded or reconstructed run")
    p.add_argument("--run", default=None, help="run table CSV to verify")
    p.add_argument("--seeds", default=None,
                   help="comma-separated seeds to rebuild and verify")
    p.add_argument("--checkpoints", default=None,
                   help="comma-separated prefix lengths for the multiset check")
    _add_common(p, schedule=True, plot=True)
    return parser


def _schedule_arg(args, default=DEFAULT_SCHEDULE) -> StageSchedule:
    if args.schedule is None:
        return StageSchedule.of(*default)
    return _parse_schedule(args.schedule)


def _cmd_generate(args) -> int:
    kind = args.kind
    if kind == "iid":
        n = args.n or 1000
        stream = SeededStream(args.seed)
        ps = PointSet.exact(stream.raw53_block(n).astype(np.int64), UNIT_DEN)
        gio.write_points_csv(args.out, ps)
    elif kind == "rn":
        schedule = _schedule_arg(args)
        n = args.n or schedule.n_max
        model = rn_model(args.seed, schedule, n)
        gio.write_points_csv(args.out, model.r)
        t = model.t_values()
        lines = [gio.POINTS_REAL_HEADER]
        lines += [f"{i + 1},{gio.fmt_real(v)}" for i, v in enumerate(t)]
        gio.atomic_write_text(args.out + ".t.csv", "\n".join(lines) + "\n")
    elif kind in ("construct-x", "construct-z"):
        schedule = _schedule_arg(args)
        run = construct(args.seed, schedule)
        n = args.n or run.n_max
        points = run.x_points(n) if kind == "construct-x" else run.z_points(n)
        gio.write_points_csv(args.out, points)
        gio.write_run_csv(args.out + ".run.csv", run)
        gio.write_swapmaps_csv(args.out + ".swapmaps.csv", run)
        bias = []
        for k in range(1, schedule.depth + 1):
            rep = midpoint_and_bias(run, k)
            st = rep.stats
            bias.append({
                "k": k, "midpoint": str(rep.midpoint),
                "left_fraction": rep.left_fraction,
                "swapped_count": rep.swapped_count,
                "first_half_below": st.first_half_below,
                "second_ytilde_below": st.second_ytilde_below,
                "left_count": st.left_count,
                "midpoint_ties": st.midpoint_ties,
            })
        gio.write_json(args.out + ".bias.json", {
            "schema_version": gio.SCHEMA_VERSION, "kind": "construction-bias",
            "seed": args.seed, "schedule": list(schedule.stages),
            "stages": bias,
        })
    else:  # sorted-gap-array
        n = args.n or 1000
        stream = SeededStream(args.seed)
        base = PointSet.exact(stream.raw53_block(n).astype(np.int64), UNIT_DEN)
        gio.write_points_csv(args.out, sorted_gap_array(base, n))
    return 0


def _write_stats_output(args, grid, empirical, reference, meta: dict,
                        ylabel: str) -> float:
    diffs = np.abs(np.asarray(empirical) - np.asarray(reference))
    max_abs_diff = float(diffs.max()) if diffs.size else 0.0
    if args.format == "json":
        payload = {"schema_version": gio.SCHEMA_VERSION, **meta,
                   "max_abs_diff": max_abs_diff,
                   "rows": gio.stats_rows(grid, empirical, reference)}
        gio.write_json(args.out, payload)
    else:
        gio.write_stats_csv(args.out, grid, empirical, reference)
    if getattr(args, "plot", False):
        from .plots import render_curves
        render_curves(args.out + ".png", grid,
                      {"empirical": empirical, "reference": reference},
                      "s", ylabel, meta.get("command", ""))
    print(f"max_abs_diff={gio.fmt_real(max_abs_diff)}")
    return max_abs_diff


def _cmd_gapcdf(args) -> int:
    ps = gio.read_points_csv(args.input)
    grid = default_s_grid(args.s_max, args.s_steps)
    cdf = gap_cdf(ps, grid)
    ref = reference_cdf(args.reference, grid)
    _write_stats_output(args, grid, cdf.probs, ref,
                        {"command": "gapcdf", "n": ps.n,
                         "reference": args.reference},
                        "fraction of gaps below s/N")
    return 0


def _cmd_discrepancy(args) -> int:
    ps = gio.read_points_csv(args.input)
    value = star_discrepancy(ps)
    if args.format == "json":
        gio.write_json(args.out, {"schema_version": gio.SCHEMA_VERSION,
                                  "command": "discrepancy", "n": ps.n,
                                  "star_discrepancy": value})
    else:
        gio.atomic_write_text(args.out,
                              f"n,star_discrepancy\n{ps.n},{gio.fmt_real(value)}\n")
    if args.plot:
        from .plots import render_curves
        grid = np.linspace(0.0, 1.0, 512)
        vals = np.sort(ps.float_values())
        ecdf = np.searchsorted(vals, grid, side="right") / ps.n
        render_curves(args.out + ".png", grid,
                      {"empirical": ecdf, "uniform": grid},
                      "x", "fraction of points below x", "discrepancy")
    print(f"star_discrepancy={gio.fmt_real(value)}")
    return 0


def _cmd_paircorr(args) -> int:
    ps = gio.read_points_csv(args.input)
    grid = default_s_grid(args.s_max, args.s_steps)
    emp = np.array([pair_correlation(ps, float(s)) for s in grid])
    ref = 2.0 * grid
    _write_stats_output(args, grid, emp, ref,
                        {"command": "paircorr", "n": ps.n},
                        "pair counts per point at scale s/N")
    return 0


def _cmd_diagnostics(args) -> int:
    schedule = _schedule_arg(args)
    run = construct(args.seed, schedule)
    rows = stage_diagnostics(run, args.k, args.band_a, args.band_b)
    header = ("ell,s,block_class_size,left_size,right_size,empty_left,"
              "occupied_right,points_in_right,doubled_condition,"
              "expected_band,doubled_band")
    if args.format == "json":
        gio.write_json(args.out, {
            "schema_version": gio.SCHEMA_VERSION, "command": "diagnostics",
            "seed": args.seed, "schedule": list(schedule.stages), "k": args.k,
            "band": [args.band_a, args.band_b],
            "rows": [{
                "ell": r.width_cells, "s": r.s,
                "block_class_size": r.block_class_size,
                "left_size": r.left_size, "right_size": r.right_size,
                "empty_left": r.n_empty_left,
                "occupied_right": r.n_occupied_right,
                "points_in_right": r.points_in_right,
                "doubled_condition": r.doubled_condition,
                "expected_band": r.expected_band,
                "doubled_band": r.doubled_band,
            } for r in rows],
        })
    else:
        lines = [header]
        for r in rows:
            lines.append(
                f"{r.width_cells},{gio.fmt_real(r.s)},{r.block_class_size},"
                f"{r.left_size},{r.right_size},{r.n_empty_left},"
                f"{r.n_occupied_right},{r.points_in_right},"
                f"{int(r.doubled_condition)},{int(r.expected_band)},"
                f"{int(r.doubled_band)}")
        gio.atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"rows={len(rows)}")
    return 0


def _cmd_moments(args) -> int:
    ps = gio.read_points_csv(args.input)
    fine = args.fine or ps.n
    powers = _parse_int_list(args.powers)
    reports = [moment_functional(ps, args.coarse, fine, k) for k in powers]
    if args.format == "json":
        gio.write_json(args.out, {
            "schema_version": gio.SCHEMA_VERSION, "command": "moments",
            "rows": [{
                "M": r.coarse_n, "N": r.fine_n, "k": r.k,
                "literal": r.literal_float, "corrected": r.corrected_float,
                "literal_exact": str(r.literal),
                "corrected_exact": str(r.corrected),
            } for r in reports],
        })
    else:
        gio.write_moments_csv(args.out, reports)
    if args.dump_descendants:
        gio.write_descendants_csv(args.dump_descendants,
                                  descendants(ps, args.coarse, fine))
    if args.plot:
        from .plots import render_curves
        render_curves(args.out + ".png", [r.k for r in reports],
                      {"literal": [r.literal_float for r in reports],
                       "corrected": [r.corrected_float for r in reports]},
                      "k", "moment value", "moments")
    print(f"rows={len(reports)}")
    return 0


def _cmd_verify(args) -> int:
    schedule = _schedule_arg(args)
    checkpoints = (_parse_int_list(args.checkpoints)
                   if args.checkpoints else None)
    if (args.run is None) == (args.seeds is None):
        raise GapLabError("verify needs exactly one of --run or --seeds")
    if args.run is not None:
        table = gio.read_run_csv(args.run)
        report = verify_table(table, schedule, checkpoints)
        report["run_file"] = args.run
    else:
        report = verify_seed_sweep(_parse_int_list(args.seeds), schedule,
                                   checkpoints)
    gio.write_json(args.out, report)
    if args.plot:
        from .plots import render_stage_bars
        runs = report.get("runs") or [report]
        stages = [row["k"] for row in runs[0]["stages"]]
        fractions = [row["left_fraction"] for row in runs[0]["stages"]]
        render_stage_bars(args.out + ".png", stages, fractions,
                          "left-half mass by stage")
    status = "PASS" if report["overall_pass"] else "FAIL"
    print(f"verification {status}")
    return 0 if report["overall_pass"] else 1


_HANDLERS = {
    "generate": _cmd_generate,
    "gapcdf": _cmd_gapcdf,
    "discrepancy": _cmd_discrepancy,
    "paircorr": _cmd_paircorr,
    "diagnostics": _cmd_diagnostics,
    "moments": _cmd_moments,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (GapLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
