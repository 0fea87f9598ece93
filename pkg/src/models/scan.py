"""
Window-scan, forecast and indicator models
"""
import datetime as dt
from datetime import date
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from .lppls import FitOutcome, LpplsFit
from .price_series import Window


class ScanMode(str, Enum):
    EXPANDING = "expanding"  # t1 fixed, t2 moves
    SHRINKING = "shrinking"  # t2 fixed, t1 moves


class ScanSpec(BaseModel):
    """Fixed endpoint plus the range swept by the moving endpoint"""

    mode: ScanMode
    fixed_end: date
    moving_start: date
    moving_end: date
    step: int = Field(default=3, ge=1)

    @model_validator(mode="after")
    def range_nonempty(self):
        if self.moving_start > self.moving_end:
            raise ValueError(f"moving range {self.moving_start} .. {self.moving_end} is empty")
        return self


class WindowRecord(BaseModel):
    """Result for one scanned window: a fit outcome or a failure reason"""

    window: Window
    t1_date: date
    t2_date: date
    outcome: Optional[FitOutcome] = None
    failure: Optional[str] = None

    @property
    def qualified(self) -> bool:
        return self.outcome is not None and self.outcome.best.qualified

    @property
    def reason(self) -> str:
        """Why the window does not contribute to the forecast"""
        if self.failure:
            return self.failure
        if self.outcome is None:
            return "not fitted"
        report = self.outcome.best.filter
        if report is None:
            return "filters not evaluated"
        return ",".join(report.failed)


class WindowScan(BaseModel):
    """Ensemble of fits over one scan, in window order"""

    spec: ScanSpec
    records: List[WindowRecord]

    @property
    def fits(self) -> List[FitOutcome]:
        return [r.outcome for r in self.records if r.outcome is not None]

    @property
    def qualified(self) -> List[LpplsFit]:
        return [r.outcome.best for r in self.records if r.qualified]

    @property
    def tc_samples(self) -> List[float]:
        return [fit.nonlinear.tc for fit in self.qualified]

    @property
    def n_qualified(self) -> int:
        return len(self.qualified)

    def summary(self) -> dict:
        return {
            "mode": self.spec.mode.value,
            "windows": len(self.records),
            "fitted": len(self.fits),
            "failed": sum(1 for r in self.records if r.failure),
            "qualified": self.n_qualified,
        }


class TcQuantile(BaseModel):
    level: float
    ordinal: float
    date: dt.date


class TcForecast(BaseModel):
    """Bootstrap quantiles of the critical time"""

    q05: TcQuantile
    q20: TcQuantile
    q50: TcQuantile
    q80: TcQuantile
    q95: TcQuantile
    n_qualified: int
    n_windows: int
    bootstrap_reps: int
    seed: int
    qualified_fraction: float
    low_confidence: bool

    @model_validator(mode="after")
    def quantiles_ordered(self):
        values = [q.ordinal for q in (self.q05, self.q20, self.q50, self.q80, self.q95)]
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError("tc quantiles must be nondecreasing")
        return self

    def contains(self, ordinal: float) -> bool:
        """True when ordinal lies inside the 5%/95% range"""
        return self.q05.ordinal <= ordinal <= self.q95.ordinal


class GapPoint(BaseModel):
    t2: int
    t2_date: date
    gap: float


class GapSeries(BaseModel):
    """tc - t2 per qualified expanding-window fit"""

    points: List[GapPoint]
    spearman: float
    change_rate: float  # slope of gap against t2


class MPoint(BaseModel):
    t2: int
    t2_date: date
    m: float
