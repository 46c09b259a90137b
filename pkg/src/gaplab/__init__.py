"""gaplab: spacing statistics on the unit torus and a gap-preserving
interval-swap construction of a non-equidistributed sequence with
exponentially distributed gaps."""

from .gapstats import (GapLabError, GapMultiset, GridMismatchError, GridPoint,
                       PointSet, SampledCdf, default_s_grid, empirical_cdf,
                       empirical_cdf_on_grid, gap_cdf, gaps, ks_distance,
                       order_points, pair_correlation, reference_cdf,
                       star_discrepancy)
from .construction import (DEFAULT_SCHEDULE, BiasReport, ConstructionRun,
                           DiagnosticsRow, GapClass, GapClassTable, RnModel,
                           ScheduleError, StageSchedule, StageStats, SwapMap,
                           apply_swap, build_swap_map, construct, discretize,
                           gap_classes, generate_rn, midpoint_and_bias,
                           rn_model, sorted_gap_array, stage_diagnostics,
                           stage_of, validate_schedule)
from .structure import (DescendantIndex, DuplicateGap, MomentReport,
                        MomentUndefinedError, descendants,
                        distinct_gaps_check, moment_functional,
                        same_gap_multiset)
from .rng import SeededStream

__version__ = "0.1.0"
