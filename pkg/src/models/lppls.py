"""
Parameter, filter and fit models for the LPPLS log-price model
"""
from datetime import date
from enum import Enum
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .price_series import Window


class NonlinearParams(BaseModel):
    """Critical time, exponent and angular log-frequency"""

    model_config = ConfigDict(frozen=True)

    tc: float
    m: float
    omega: float = Field(ge=0.0)

    @field_validator("tc", "m")
    @classmethod
    def finite(cls, v):
        if not np.isfinite(v):
            raise ValueError("must be finite")
        return v

    def as_vector(self) -> np.ndarray:
        return np.array([self.tc, self.m, self.omega], dtype=float)

    @classmethod
    def from_vector(cls, x) -> "NonlinearParams":
        return cls(tc=float(x[0]), m=float(x[1]), omega=float(x[2]))


class LinearParams(BaseModel):
    """Slaved parameters A, B, C1 = C cos(phi), C2 = C sin(phi)"""

    model_config = ConfigDict(frozen=True)

    A: float
    B: float
    C1: float
    C2: float

    @field_validator("A", "B", "C1", "C2")
    @classmethod
    def finite(cls, v):
        if not np.isfinite(v):
            raise ValueError("must be finite")
        return v

    def as_vector(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C1, self.C2], dtype=float)

    @classmethod
    def from_vector(cls, x) -> "LinearParams":
        return cls(A=float(x[0]), B=float(x[1]), C1=float(x[2]), C2=float(x[3]))


class BSignRule(str, Enum):
    NEGATIVE = "negative"  # B < 0, super-exponential growth
    BELOW_ONE = "below-one"  # B < 1


class FilterConditions(BaseModel):
    """Bounds and thresholds a fit must meet to count as a bubble signal"""

    model_config = ConfigDict(frozen=True)

    m_min: float = 0.1
    m_max: float = 0.9
    omega_min: float = 6.0
    omega_max: float = 13.0
    tc_horizon_fraction: float = Field(default=1.0 / 3.0, gt=0.0)
    damping_min: float = 1.0
    oscillations_min: float = 2.5
    b_sign_rule: BSignRule = BSignRule.NEGATIVE

    @model_validator(mode="after")
    def ranges_nonempty(self):
        if self.m_min >= self.m_max:
            raise ValueError("m range is empty")
        if self.omega_min >= self.omega_max or self.omega_min < 0:
            raise ValueError("omega range is empty or negative")
        return self

    def tc_upper(self, window: Window) -> float:
        return window.t2 + (window.t2 - window.t1) * self.tc_horizon_fraction


class FilterReport(BaseModel):
    """Outcome of each qualification condition, evaluated independently"""

    m_in_range: bool
    omega_in_range: bool
    tc_in_range: bool
    damping: float
    damping_ok: bool
    oscillations: float
    oscillations_ok: bool
    b_negative: bool
    b_below_one: bool
    b_sign_rule: BSignRule = BSignRule.NEGATIVE
    qualified: bool

    @property
    def failed(self) -> List[str]:
        """Names of the conditions that did not hold"""
        checks = {
            "m_in_range": self.m_in_range,
            "omega_in_range": self.omega_in_range,
            "tc_in_range": self.tc_in_range,
            "damping_ok": self.damping_ok,
            "oscillations_ok": self.oscillations_ok,
        }
        if self.b_sign_rule == BSignRule.NEGATIVE:
            checks["b_negative"] = self.b_negative
        else:
            checks["b_below_one"] = self.b_below_one
        return [name for name, ok in checks.items() if not ok]


class LpplsFit(BaseModel):
    """One calibrated model on one window"""

    window: Window
    nonlinear: NonlinearParams
    linear: LinearParams
    sse: float = Field(ge=0.0)
    seed: int
    tc_date: Optional[date] = None
    filter: Optional[FilterReport] = None

    @property
    def qualified(self) -> bool:
        return self.filter is not None and self.filter.qualified

    @property
    def gap(self) -> float:
        """Distance from window end to the fitted critical time"""
        return self.nonlinear.tc - self.window.t2

    def __str__(self) -> str:
        nl = self.nonlinear
        verdict = "qualified" if self.qualified else "not qualified"
        return (f"window {self.window}: tc={nl.tc:.2f} ({self.tc_date}) m={nl.m:.3f} "
                f"omega={nl.omega:.3f} sse={self.sse:.4g} [{verdict}]")


class RestartResult(BaseModel):
    """Best point of one optimizer restart"""

    nonlinear: NonlinearParams
    sse: float
    seed: int


class FitOutcome(BaseModel):
    """Best fit over all restarts on one window"""

    best: LpplsFit
    all_restarts: List[RestartResult]
    evaluations: int

    @model_validator(mode="after")
    def best_is_minimum(self):
        if self.all_restarts and self.best.sse > min(r.sse for r in self.all_restarts):
            raise ValueError("best fit must carry the minimum restart sse")
        return self


class Tone(BaseModel):
    """Extra log-periodic component C1 f cos(omega ln dt) + C2 f sin(omega ln dt)"""

    omega: float = Field(gt=0.0)
    C1: float = 0.0
    C2: float = 0.0


class NoiseModel(BaseModel):
    """Residual generator for synthetic series"""

    kind: Literal["none", "gaussian", "ou"] = "none"
    sigma: float = Field(default=0.0, ge=0.0)
    phi: float = 0.0

    @model_validator(mode="after")
    def check_parameters(self):
        if self.kind == "ou" and not abs(self.phi) < 1.0:
            raise ValueError("ou noise requires |phi| < 1")
        if self.kind != "none" and self.sigma <= 0.0:
            raise ValueError(f"{self.kind} noise requires sigma > 0")
        return self

    def __str__(self) -> str:
        if self.kind == "none":
            return "none"
        if self.kind == "gaussian":
            return f"gaussian(sigma={self.sigma})"
        return f"ou(phi={self.phi}, sigma={self.sigma})"
