"""Best responses, equilibrium verification, grid enumeration, LPoA/LPoS."""
from .deviations import (
    DeviationReport,
    best_deviation,
    candidate_deviations,
    candidate_deviations_egfp,
    candidate_deviations_scalar,
    utility_gain,
)
from .grid import GridSpec, egfp_strategies, egfp_thresholds, scalar_levels
from .search import (
    EquilibriumScan,
    LpoaReport,
    enumerate_equilibria,
    lpoa_report,
    report_from_scan,
    scan_equilibria,
    write_equilibria_csv,
    write_equilibria_jsonl,
)
from .verify import EGFP_DEFAULT_THETA, EquilibriumReport, default_theta, verify_equilibrium

__all__ = [
    "DeviationReport",
    "EquilibriumReport",
    "EquilibriumScan",
    "GridSpec",
    "LpoaReport",
    "EGFP_DEFAULT_THETA",
    "best_deviation",
    "candidate_deviations",
    "candidate_deviations_egfp",
    "candidate_deviations_scalar",
    "default_theta",
    "egfp_strategies",
    "egfp_thresholds",
    "enumerate_equilibria",
    "lpoa_report",
    "report_from_scan",
    "scalar_levels",
    "scan_equilibria",
    "utility_gain",
    "verify_equilibrium",
    "write_equilibria_csv",
    "write_equilibria_jsonl",
]
