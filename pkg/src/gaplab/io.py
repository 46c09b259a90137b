"""CSV/JSON serialisation for point sets, runs, swap maps and reports.

Conventions: exact points travel as integer numerator/denominator columns,
reals as 17-significant-digit decimals (lossless float64 round-trip). All
writes are atomic (write to a temp file in the target directory, then
rename), so concurrent readers never observe partial files.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .construction import ConstructionRun
from .gapstats import GapLabError, PointSet

SCHEMA_VERSION = 1

POINTS_EXACT_HEADER = "n,num,den"
POINTS_REAL_HEADER = "n,value"
RUN_HEADER = "n,y,ytilde_num,ytilde_den,x_num,x_den,z_num,z_den"
SWAPMAP_HEADER = "k,ell,left_num,right_num,width_num,den"
STATS_HEADER = "s,empirical,reference,abs_diff"
MOMENTS_HEADER = "M,N,k,literal,corrected"
DESCENDANTS_HEADER = "i,g_num,g_den,count"


class PointFileError(GapLabError):
    """Malformed input file; carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def fmt_real(x: float) -> str:
    """17 significant digits: enough to round-trip any float64."""
    return f"{x:.17g}"


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


def write_points_csv(path: str, ps: PointSet) -> None:
    lines = []
    if ps.is_exact:
        lines.append(POINTS_EXACT_HEADER)
        den = ps.denominator
        for label, num in zip(ps.labels.tolist(), ps.numerators.tolist()):
            lines.append(f"{label},{num},{den}")
    else:
        lines.append(POINTS_REAL_HEADER)
        for label, val in zip(ps.labels.tolist(), ps.values.tolist()):
            lines.append(f"{label},{fmt_real(val)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_points_csv(path: str) -> PointSet:
    """Parse a points file in either exact or real format."""
    with open(path, "r") as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise PointFileError(1, "empty file")
    header = lines[0].strip()
    if header == POINTS_EXACT_HEADER:
        exact = True
    elif header == POINTS_REAL_HEADER:
        exact = False
    else:
        raise PointFileError(1, f"unrecognised header {header!r}")
    labels: list[int] = []
    nums: list[int] = []
    vals: list[float] = []
    den: int | None = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            if exact:
                if len(parts) != 3:
                    raise ValueError("expected 3 columns")
                labels.append(int(parts[0]))
                nums.append(int(parts[1]))
                row_den = int(parts[2])
                if den is None:
                    den = row_den
                elif row_den != den:
                    raise ValueError("points must share one denominator")
            else:
                if len(parts) != 2:
                    raise ValueError("expected 2 columns")
                labels.append(int(parts[0]))
                vals.append(float(parts[1]))
        except ValueError as exc:
            raise PointFileError(lineno, str(exc)) from None
    if exact:
        if den is None:
            raise PointFileError(2, "no data rows")
        try:
            return PointSet.exact(nums, den, labels=labels)
        except GapLabError as exc:
            raise PointFileError(2, str(exc)) from None
    if not vals:
        raise PointFileError(2, "no data rows")
    try:
        return PointSet.real(vals, labels=labels)
    except GapLabError as exc:
        raise PointFileError(2, str(exc)) from None


@dataclass(frozen=True)
class RunTable:
    """The per-index record table of a construction run, as read from disk."""

    y: np.ndarray
    ytilde_num: np.ndarray
    x_num: np.ndarray
    z_num: np.ndarray
    den: np.ndarray

    @property
    def n_max(self) -> int:
        return int(self.y.size)


def run_table_of(run: ConstructionRun) -> RunTable:
    return RunTable(y=run.y, ytilde_num=run.ytilde_num, x_num=run.x_num,
                    z_num=run.z_num, den=run.stage_den)


def write_run_csv(path: str, run: ConstructionRun) -> None:
    lines = [RUN_HEADER]
    den = run.stage_den
    for i in range(run.n_max):
        d = den[i]
        lines.append(f"{i + 1},{fmt_real(run.y[i])},{run.ytilde_num[i]},{d},"
                     f"{run.x_num[i]},{d},{run.z_num[i]},{d}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_run_csv(path: str) -> RunTable:
    with open(path, "r") as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0].strip() != RUN_HEADER:
        raise PointFileError(1, f"expected header {RUN_HEADER!r}")
    y, yt, x, z, den = [], [], [], [], []
    expected_n = 1
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            if len(parts) != 8:
                raise ValueError("expected 8 columns")
            n = int(parts[0])
            if n != expected_n:
                raise ValueError(f"expected index {expected_n}, found {n}")
            expected_n += 1
            y.append(float(parts[1]))
            yt.append(int(parts[2]))
            row_den = int(parts[3])
            if int(parts[5]) != row_den or int(parts[7]) != row_den:
                raise ValueError("x/z denominators must match the row grid")
            x.append(int(parts[4]))
            z.append(int(parts[6]))
            den.append(row_den)
        except ValueError as exc:
            raise PointFileError(lineno, str(exc)) from None
    if not y:
        raise PointFileError(2, "no data rows")
    return RunTable(y=np.array(y), ytilde_num=np.array(yt, dtype=np.int64),
                    x_num=np.array(x, dtype=np.int64),
                    z_num=np.array(z, dtype=np.int64),
                    den=np.array(den, dtype=np.int64))


def write_swapmaps_csv(path: str, run: ConstructionRun) -> None:
    lines = [SWAPMAP_HEADER]
    for k, smap in enumerate(run.swap_maps, start=1):
        den = smap.grid_den
        for left, right, width in zip(smap.left_starts.tolist(),
                                      smap.right_starts.tolist(),
                                      smap.widths.tolist()):
            lines.append(f"{k},{width},{left},{right},{width},{den}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_stats_csv(path: str, grid, empirical, reference) -> None:
    lines = [STATS_HEADER]
    for s, emp, ref in zip(grid, empirical, reference):
        lines.append(f"{fmt_real(s)},{fmt_real(emp)},{fmt_real(ref)},"
                     f"{fmt_real(abs(emp - ref))}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def stats_rows(grid, empirical, reference) -> list[dict]:
    return [
        {"s": float(s), "empirical": float(emp), "reference": float(ref),
         "abs_diff": abs(float(emp) - float(ref))}
        for s, emp, ref in zip(grid, empirical, reference)
    ]


def write_moments_csv(path: str, reports) -> None:
    lines = [MOMENTS_HEADER]
    for rep in reports:
        lines.append(f"{rep.coarse_n},{rep.fine_n},{rep.k},"
                     f"{fmt_real(rep.literal_float)},"
                     f"{fmt_real(rep.corrected_float)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_descendants_csv(path: str, index) -> None:
    lines = [DESCENDANTS_HEADER]
    for i, (g, c) in enumerate(zip(index.gap_nums.tolist(),
                                   index.counts.tolist()), start=1):
        lines.append(f"{i},{g},{index.den},{c}")
    atomic_write_text(path, "\n".join(lines) + "\n")
