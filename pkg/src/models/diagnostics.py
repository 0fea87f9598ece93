"""
Models for residual diagnostics: Lomb periodograms and unit-root tests
"""
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from .price_series import Window


class DetrendedResiduals(BaseModel):
    """r(x) on the x = ln(tc - tau) axis"""

    x: List[float]
    r: List[float]

    @model_validator(mode="after")
    def aligned(self):
        if len(self.x) != len(self.r):
            raise ValueError("x and r must have the same length")
        return self


class LombGrid(BaseModel):
    """Angular log-frequency grid"""

    omega_min: float = Field(default=1.0, gt=0.0)
    omega_max: float = 25.0
    points: int = Field(default=512, ge=2)

    @model_validator(mode="after")
    def range_nonempty(self):
        if self.omega_max <= self.omega_min:
            raise ValueError("frequency range is empty")
        return self

    @property
    def spacing(self) -> float:
        return (self.omega_max - self.omega_min) / (self.points - 1)


class LombResult(BaseModel):
    frequencies: List[float]
    power: List[float]
    omega_lomb: float
    p_max: float
    false_alarm: float = Field(ge=0.0, le=1.0)
    omega_fit: Optional[float] = None
    ratio: Optional[float] = None  # omega_fit / omega_lomb


class HarmonicEntry(BaseModel):
    window: Window
    omega_lomb: float
    omega_fit: float
    ratio: float          # omega_fit / omega_lomb
    inverse_ratio: float  # omega_lomb / omega_fit
    p_max: float
    false_alarm: float


class HarmonicReport(BaseModel):
    entries: List[HarmonicEntry]
    ratio_low: float
    ratio_high: float
    fraction_in_band: float  # share of entries with ratio in [ratio_low, ratio_high]
    failures: Dict[str, str] = {}


class UnitRootResult(BaseModel):
    statistic: float
    critical_05: float
    critical_01: float
    reject_at_05: bool
    reject_at_01: bool
    nobs: int
    lags: int


class WindowUnitRoot(BaseModel):
    window: Window
    pp: UnitRootResult
    adf: UnitRootResult


class RejectionSummary(BaseModel):
    level: float
    pp_percent: float = Field(ge=0.0, le=100.0)
    adf_percent: float = Field(ge=0.0, le=100.0)


class UnitRootReport(BaseModel):
    windows: List[WindowUnitRoot]
    summary: List[RejectionSummary]
    failures: Dict[str, str] = {}

    def percent(self, test: str, level: float) -> float:
        for row in self.summary:
            if row.level == level:
                return row.pp_percent if test == "pp" else row.adf_percent
        raise KeyError(f"no summary row at level {level}")
