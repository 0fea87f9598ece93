"""
Resolved configuration of one CLI run
"""
from datetime import date
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .settings import settings
from ..core.optimizer import LandscapePair
from ..models.lppls import BSignRule, FilterConditions
from ..models.scan import ScanMode


class RunConfig(BaseModel):
    """Every knob of a run; embedded in each artifact for provenance"""

    model_config = ConfigDict(extra="forbid")

    command: Literal["fit", "scan", "diagnose", "synth", "landscape"]
    seed: int

    # Input
    input: Optional[str] = None
    date_column: str = settings.date_column
    price_column: str = settings.price_column
    label: Optional[str] = None
    out_dir: str = settings.out_dir

    # Single window
    t1: Optional[str] = None
    t2: Optional[str] = None

    # Scan
    mode: Optional[ScanMode] = None
    fixed: Optional[date] = None
    range_start: Optional[date] = None
    range_end: Optional[date] = None
    step: int = Field(default=settings.step, ge=1)
    bootstrap_reps: int = Field(default=settings.bootstrap_reps, ge=1)

    # Optimizer
    population_size: int = Field(default=settings.population_size, ge=4)
    sigma0: float = Field(default=settings.sigma0, gt=0.0)
    max_iterations: int = Field(default=settings.max_iterations, ge=1)
    tol_fun: float = Field(default=settings.tol_fun, ge=0.0)
    restarts: int = Field(default=settings.restarts, ge=1)
    min_window_length: int = Field(default=settings.min_window_length, ge=4)
    condition_threshold: float = Field(default=settings.condition_threshold, gt=1.0)

    # Filters
    m_min: float = settings.m_min
    m_max: float = settings.m_max
    omega_min: float = settings.omega_min
    omega_max: float = settings.omega_max
    tc_horizon_fraction: float = settings.tc_horizon_fraction
    damping_min: float = settings.damping_min
    oscillations_min: float = settings.oscillations_min
    b_sign_rule: BSignRule = BSignRule(settings.b_sign_rule)

    # Diagnostics
    scan: Optional[str] = None
    check: Literal["lomb", "unitroot", "all"] = "all"
    lomb_omega_min: float = settings.lomb_omega_min
    lomb_omega_max: float = settings.lomb_omega_max
    lomb_points: int = Field(default=settings.lomb_points, ge=2)
    harmonic_ratio_low: float = settings.harmonic_ratio_low
    harmonic_ratio_high: float = settings.harmonic_ratio_high
    adf_lags: int = Field(default=0, ge=0)
    pp_bandwidth: Optional[int] = Field(default=None, ge=0)

    # Landscape
    pairs: List[LandscapePair] = [LandscapePair.TC_M, LandscapePair.TC_OMEGA, LandscapePair.M_OMEGA]
    resolution: int = Field(default=50, ge=8)

    # Synthesizer
    tc: Optional[float] = None
    m: Optional[float] = None
    omega: Optional[float] = Field(default=None, ge=0.0)
    A: float = 8.0
    B: float = -0.5
    C1: float = 0.02
    C2: float = 0.02
    length: Optional[int] = Field(default=None, ge=2)
    start_date: date = date(2000, 1, 3)
    noise: Literal["none", "gaussian", "ou"] = "none"
    sigma: float = Field(default=0.0, ge=0.0)
    phi: float = 0.0
    output: Optional[str] = None

    @field_validator("pairs", mode="before")
    @classmethod
    def split_pairs(cls, v):
        if isinstance(v, str):
            return [p.strip() for p in v.split(",") if p.strip()]
        return v

    def filter_conditions(self) -> FilterConditions:
        return FilterConditions(
            m_min=self.m_min,
            m_max=self.m_max,
            omega_min=self.omega_min,
            omega_max=self.omega_max,
            tc_horizon_fraction=self.tc_horizon_fraction,
            damping_min=self.damping_min,
            oscillations_min=self.oscillations_min,
            b_sign_rule=self.b_sign_rule,
        )
