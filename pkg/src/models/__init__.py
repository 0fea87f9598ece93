"""
Data models for lppls-scanner
"""

from .price_series import PriceSeries, Window
from .lppls import (
    BSignRule,
    FilterConditions,
    FilterReport,
    FitOutcome,
    LinearParams,
    LpplsFit,
    NoiseModel,
    NonlinearParams,
    RestartResult,
    Tone,
)
from .scan import GapSeries, ScanMode, ScanSpec, TcForecast, WindowRecord, WindowScan
from .diagnostics import (
    DetrendedResiduals,
    HarmonicReport,
    LombGrid,
    LombResult,
    UnitRootReport,
    UnitRootResult,
)

__all__ = [
    "PriceSeries",
    "Window",
    "BSignRule",
    "FilterConditions",
    "FilterReport",
    "FitOutcome",
    "LinearParams",
    "LpplsFit",
    "NoiseModel",
    "NonlinearParams",
    "RestartResult",
    "Tone",
    "GapSeries",
    "ScanMode",
    "ScanSpec",
    "TcForecast",
    "WindowRecord",
    "WindowScan",
    "DetrendedResiduals",
    "HarmonicReport",
    "LombGrid",
    "LombResult",
    "UnitRootReport",
    "UnitRootResult",
]
