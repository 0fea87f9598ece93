"""
PriceSeries and Window models for daily index data on a trading-day axis
"""
from datetime import date
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class Window(BaseModel):
    """Inclusive [t1, t2] range of trading-day ordinals"""

    model_config = ConfigDict(frozen=True)

    t1: int
    t2: int

    @field_validator("t1")
    @classmethod
    def t1_non_negative(cls, v):
        if v < 0:
            raise ValueError("t1 must be a non-negative ordinal")
        return v

    @model_validator(mode="after")
    def t1_before_t2(self):
        if self.t1 >= self.t2:
            raise ValueError(f"window start {self.t1} must precede end {self.t2}")
        return self

    @property
    def length(self) -> int:
        """Number of trading days in the window"""
        return self.t2 - self.t1 + 1

    @property
    def tau(self) -> np.ndarray:
        """Ordinals t1..t2 as floats"""
        return np.arange(self.t1, self.t2 + 1, dtype=float)

    def __str__(self) -> str:
        return f"[{self.t1}, {self.t2}]"


class PriceSeries(BaseModel):
    """Calendar-dated daily closes; ordinal i is the i-th trading day"""

    model_config = ConfigDict(frozen=True)

    dates: List[date]
    prices: List[float]
    label: Optional[str] = None

    @field_validator("prices")
    @classmethod
    def prices_positive(cls, v):
        for i, price in enumerate(v):
            if not np.isfinite(price) or price <= 0:
                raise ValueError(f"price at position {i} must be positive and finite, got {price}")
        return v

    @model_validator(mode="after")
    def aligned_and_ordered(self):
        if len(self.dates) != len(self.prices):
            raise ValueError("dates and prices must have the same length")
        if not self.dates:
            raise ValueError("series is empty")
        for i in range(1, len(self.dates)):
            if self.dates[i] <= self.dates[i - 1]:
                raise ValueError(f"dates must be strictly increasing (position {i}: {self.dates[i]})")
        return self

    @property
    def size(self) -> int:
        return len(self.dates)

    @property
    def ordinals(self) -> np.ndarray:
        return np.arange(self.size, dtype=int)

    @property
    def last_ordinal(self) -> int:
        return self.size - 1

    @property
    def log_prices(self) -> np.ndarray:
        return np.log(np.asarray(self.prices, dtype=float))

    def __str__(self) -> str:
        name = self.label or "series"
        return f"{name}: {self.size} trading days {self.dates[0]} .. {self.dates[-1]}"
