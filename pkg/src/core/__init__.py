"""
Core LPPLS calibration and diagnostics for lppls-scanner
"""

from .cmaes import CmaesConfig, cmaes_minimize
from .lppls import (
    check_filters,
    convert_to_original_form,
    cost,
    evaluate,
    solve_linear,
    synthesize,
)
from .optimizer import LandscapePair, SearchBox, fit_window, grid_slice
from .windows import WindowScanner, forecast_tc, gap_series, generate_windows, m_series, run_scan
from .diagnostics import adf_test, detrend, harmonic_check, lomb, pp_test, unit_root_report

__all__ = [
    "CmaesConfig",
    "cmaes_minimize",
    "check_filters",
    "convert_to_original_form",
    "cost",
    "evaluate",
    "solve_linear",
    "synthesize",
    "LandscapePair",
    "SearchBox",
    "fit_window",
    "grid_slice",
    "WindowScanner",
    "forecast_tc",
    "gap_series",
    "generate_windows",
    "m_series",
    "run_scan",
    "adf_test",
    "detrend",
    "harmonic_check",
    "lomb",
    "pp_test",
    "unit_root_report",
]
