from .classical import classical_item_stats
from .drift import DEFAULT_DRIFT_THRESHOLD, drift_check
from .export import (compute_item_statistics, read_item_stats_csv,
                     write_flags_csv, write_item_stats_csv,
                     write_option_stats_csv)
from .fit import fit_statistics
from .flags import REASONS, FlagRuleConfig, statistical_flags
from .rasch import (CalibrationError, CalibrationResult, calibrate,
                    calibrate_matrix, rasch_loglik, rasch_score)
from .stats_types import ItemStatistics, OptionStat

rasch_calibrate = calibrate

__all__ = [
    "classical_item_stats", "drift_check", "DEFAULT_DRIFT_THRESHOLD",
    "compute_item_statistics", "read_item_stats_csv",
    "write_item_stats_csv",
    "write_option_stats_csv", "write_flags_csv", "fit_statistics",
    "statistical_flags", "FlagRuleConfig", "REASONS",
    "calibrate", "rasch_calibrate", "calibrate_matrix", "CalibrationError",
    "CalibrationResult", "rasch_loglik", "rasch_score",
    "ItemStatistics", "OptionStat",
]
