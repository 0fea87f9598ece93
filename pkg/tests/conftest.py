"""
Shared fixtures: synthetic series, hand-built fits and CSV writers
"""
from datetime import date
from pathlib import Path
from typing import List, Optional

import pandas as pd
import pytest

from src.core.lppls import check_filters, synthesize
from src.models.lppls import (
    FilterConditions,
    FitOutcome,
    LinearParams,
    LpplsFit,
    NonlinearParams,
    RestartResult,
)
from src.models.price_series import PriceSeries, Window
from src.models.scan import ScanMode, ScanSpec, WindowRecord, WindowScan

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
SSEC_CSV = DATA_DIR / "ssec_2014_2015.csv"
SZSC_CSV = DATA_DIR / "szsc_2014_2015.csv"

TRUE_LINEAR = LinearParams(A=8.0, B=-0.5, C1=0.02, C2=0.02)
TRUE_NONLINEAR = NonlinearParams(tc=310.0, m=0.5, omega=9.0)
# Damping m|B|/(omega C) clears 1 only with the smaller oscillation amplitude
QUALIFIED_LINEAR = LinearParams(A=8.0, B=-0.5, C1=0.01, C2=0.01)
SYNTH_WINDOW = Window(t1=0, t2=249)

requires_ssec = pytest.mark.skipif(not SSEC_CSV.is_file(), reason="bundled SSEC data not present")
requires_szsc = pytest.mark.skipif(not SZSC_CSV.is_file(), reason="bundled SZSC data not present")


@pytest.fixture
def synthetic_series() -> PriceSeries:
    """Noiseless 250-day series with tc=310, m=0.5, omega=9"""
    return synthesize(TRUE_NONLINEAR, TRUE_LINEAR, SYNTH_WINDOW)


@pytest.fixture
def bubble_series() -> PriceSeries:
    """Noiseless series whose windows ending at 233 or later pass every filter"""
    return synthesize(TRUE_NONLINEAR, QUALIFIED_LINEAR, SYNTH_WINDOW)


@pytest.fixture
def flat_series() -> PriceSeries:
    dates = [d.date() for d in pd.bdate_range("2015-01-05", periods=40)]
    return PriceSeries(dates=dates, prices=[100.0] * 40, label="flat")


def make_fit(window: Window, tc: float, m: float = 0.5, omega: float = 9.0,
             linear: LinearParams = QUALIFIED_LINEAR, sse: float = 0.01,
             conditions: Optional[FilterConditions] = None) -> LpplsFit:
    """Fit object with real filter evaluation, for tests that do not need the optimizer"""
    fit = LpplsFit(
        window=window,
        nonlinear=NonlinearParams(tc=tc, m=m, omega=omega),
        linear=linear,
        sse=sse,
        seed=0,
    )
    return fit.model_copy(update={"filter": check_filters(fit, conditions)})


def make_scan(fits: List[LpplsFit], series: PriceSeries,
              mode: ScanMode = ScanMode.EXPANDING) -> WindowScan:
    """WindowScan wrapping already-built fits in the given order"""
    records = [
        WindowRecord(
            window=fit.window,
            t1_date=series.dates[fit.window.t1],
            t2_date=series.dates[fit.window.t2],
            outcome=FitOutcome(
                best=fit,
                all_restarts=[RestartResult(nonlinear=fit.nonlinear, sse=fit.sse, seed=fit.seed)],
                evaluations=1,
            ),
        )
        for fit in fits
    ]
    first, last = records[0], records[-1]
    if mode == ScanMode.EXPANDING:
        spec = ScanSpec(mode=mode, fixed_end=first.t1_date, moving_start=first.t2_date,
                        moving_end=last.t2_date)
    else:
        spec = ScanSpec(mode=mode, fixed_end=first.t2_date, moving_start=first.t1_date,
                        moving_end=last.t1_date)
    return WindowScan(spec=spec, records=records)


@pytest.fixture
def write_prices(tmp_path):
    """Write (date, close) rows to a CSV and return its path"""

    def _write(rows, name: str = "prices.csv", header: str = "date,close") -> Path:
        path = tmp_path / name
        lines = [header] + [f"{d.isoformat() if isinstance(d, date) else d},{p}" for d, p in rows]
        path.write_text("\n".join(lines) + "\n")
        return path

    return _write
