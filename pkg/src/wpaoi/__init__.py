"""Average age of information for a wireless-powered charge-and-transmit link.

A sensor harvests RF energy into a capacitor of size B and sends a status
update with full discharge each time the capacitor fills. This package
evaluates the closed-form average age of the delivered updates and checks
it against slot-level Monte Carlo simulation. It also sizes the capacitor
to minimize that age.
"""

from .analytics import (
    AnalyticReport,
    analytic_report,
    aoi_limit_fixed_B,
    aoi_limit_ratio,
    average_aoi,
    interarrival_moments,
    mean_peak_area,
    recharge_moments,
    recharge_pmf,
    success_probability,
    truncation_k_max,
)
from .experiments import (
    CSV_HEADER,
    SweepRow,
    SweepSpec,
    ValidationReport,
    ValidationRow,
    format_validation_report,
    rows_to_csv,
    rows_to_json,
    sweep_aoi_vs_B,
    sweep_minaoi_vs_P,
    validation_report,
)
from .model import (
    DerivedParams,
    SystemParams,
    build_params,
    channel_rate_from_distance,
    dbm_to_watts,
    derive,
    watts_to_dbm,
)
from .optimizer import OptResult, grid_scan, objective, optimize_capacitor
from .simulator import (
    EventLog,
    NoSuccessError,
    SimConfig,
    SimStats,
    Warmup,
    batch_ci,
    empirical_aoi,
    extract_cycles,
    sample_events,
    simulate,
    trace_rows,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticReport",
    "CSV_HEADER",
    "DerivedParams",
    "EventLog",
    "NoSuccessError",
    "OptResult",
    "SimConfig",
    "SimStats",
    "SweepRow",
    "SweepSpec",
    "SystemParams",
    "ValidationReport",
    "ValidationRow",
    "Warmup",
    "analytic_report",
    "aoi_limit_fixed_B",
    "aoi_limit_ratio",
    "average_aoi",
    "batch_ci",
    "build_params",
    "channel_rate_from_distance",
    "dbm_to_watts",
    "derive",
    "empirical_aoi",
    "extract_cycles",
    "format_validation_report",
    "grid_scan",
    "interarrival_moments",
    "mean_peak_area",
    "objective",
    "optimize_capacitor",
    "recharge_moments",
    "recharge_pmf",
    "rows_to_csv",
    "rows_to_json",
    "sample_events",
    "simulate",
    "success_probability",
    "sweep_aoi_vs_B",
    "sweep_minaoi_vs_P",
    "trace_rows",
    "truncation_k_max",
    "validation_report",
    "watts_to_dbm",
    "write_trace",
]
