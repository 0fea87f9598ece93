"""
Expanding and shrinking window ensembles, tc forecasts and the gap indicator
"""
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from scipy import stats

from .cmaes import CmaesConfig
from ..errors import InsufficientFitsError, LpplsError, ScanSpecError
from .lppls import CONDITION_THRESHOLD
from .optimizer import MIN_WINDOW_LENGTH, fit_window
from ..data.timeseries import ordinal_to_date, resolve_ordinal
from ..models.lppls import FilterConditions
from ..models.price_series import PriceSeries, Window
from ..models.scan import (
    GapPoint,
    GapSeries,
    MPoint,
    ScanMode,
    ScanSpec,
    TcForecast,
    TcQuantile,
    WindowRecord,
    WindowScan,
)

logger = logging.getLogger(__name__)

QUANTILE_LEVELS = (0.05, 0.20, 0.50, 0.80, 0.95)
MIN_FORECAST_FITS = 5
LOW_CONFIDENCE_FRACTION = 0.5


def generate_windows(spec: ScanSpec, series: PriceSeries) -> List[Window]:
    """
    Windows ordered by the moving endpoint, stepped by spec.step trading days

    The moving range snaps inward to trading days; so does the fixed end
    (forward for an expanding t1, backward for a shrinking t2).
    """
    try:
        start = resolve_ordinal(series, spec.moving_start, snap="forward")
        end = resolve_ordinal(series, spec.moving_end, snap="backward")
        if spec.mode == ScanMode.EXPANDING:
            fixed = resolve_ordinal(series, spec.fixed_end, snap="forward")
        else:
            fixed = resolve_ordinal(series, spec.fixed_end, snap="backward")
    except LpplsError as e:
        raise ScanSpecError(f"scan dates do not resolve in {series.label or 'series'}: {e}") from e

    if start > end:
        raise ScanSpecError(f"moving range {spec.moving_start} .. {spec.moving_end} holds no trading day")

    windows = []
    for moving in range(start, end + 1, spec.step):
        t1, t2 = (fixed, moving) if spec.mode == ScanMode.EXPANDING else (moving, fixed)
        if t1 >= t2:
            raise ScanSpecError(f"{spec.mode.value} scan produces an empty window [{t1}, {t2}]")
        windows.append(Window(t1=t1, t2=t2))

    if not windows:
        raise ScanSpecError("scan produces no windows")
    return windows


def _fit_record(args: Tuple[PriceSeries, Window, CmaesConfig, FilterConditions, int, float]) -> WindowRecord:
    series, window, config, conditions, min_length, condition_threshold = args
    record = WindowRecord(
        window=window,
        t1_date=series.dates[window.t1],
        t2_date=series.dates[window.t2],
    )
    try:
        outcome = fit_window(series, window, config, conditions, min_length=min_length,
                             condition_threshold=condition_threshold)
        return record.model_copy(update={"outcome": outcome})
    except (LpplsError, ValueError, np.linalg.LinAlgError) as e:
        logger.warning(f"Window {window} failed: {e}")
        return record.model_copy(update={"failure": f"{type(e).__name__}: {e}"})


class WindowScanner:
    """
    Fits every window of a scan, optionally on a process pool

    Each window is fitted with the same CmaesConfig (same seed), so the result
    does not depend on the number of workers or their scheduling.
    """

    def __init__(self, config: CmaesConfig = None, conditions: FilterConditions = None,
                 jobs: Optional[int] = None, min_length: int = MIN_WINDOW_LENGTH,
                 condition_threshold: float = CONDITION_THRESHOLD):
        self.config = config or CmaesConfig()
        self.conditions = conditions or FilterConditions()
        self.jobs = jobs or os.cpu_count() or 1
        self.min_length = min_length
        self.condition_threshold = condition_threshold
        self.logger = logging.getLogger(__name__)

    def run_scan(self, series: PriceSeries, spec: ScanSpec) -> WindowScan:
        windows = generate_windows(spec, series)
        self.logger.info(f"Scanning {len(windows)} {spec.mode.value} windows with {self.jobs} worker(s)")

        tasks = [(series, w, self.config, self.conditions, self.min_length, self.condition_threshold)
                 for w in windows]
        if self.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=min(self.jobs, len(tasks))) as pool:
                records = list(pool.map(_fit_record, tasks))
        else:
            records = [_fit_record(task) for task in tasks]

        scan = WindowScan(spec=spec, records=records)
        self.logger.info(f"Scan complete: {scan.summary()}")
        return scan


def run_scan(series: PriceSeries, spec: ScanSpec, config: CmaesConfig = None,
             conditions: FilterConditions = None, jobs: Optional[int] = 1) -> WindowScan:
    """Fit every window of spec; per-window errors become failure records"""
    return WindowScanner(config, conditions, jobs).run_scan(series, spec)


def forecast_tc(scan: WindowScan, series: PriceSeries, bootstrap_reps: int = 1000,
                seed: int = 0, min_qualified: int = MIN_FORECAST_FITS) -> TcForecast:
    """
    Bootstrap quantiles of the qualified tc estimates

    The qualified per-window tc values are resampled with replacement
    bootstrap_reps times; quantiles (linear interpolation between order
    statistics) are taken over the pooled resamples.
    """
    samples = np.asarray(scan.tc_samples, dtype=float)
    if len(samples) < min_qualified:
        raise InsufficientFitsError(f"{len(samples)} qualified fits, need at least {min_qualified}")
    if bootstrap_reps < 1:
        raise ValueError("bootstrap_reps must be positive")

    rng = np.random.default_rng(seed)
    pooled = rng.choice(samples, size=(bootstrap_reps, len(samples)), replace=True).ravel()
    values = np.quantile(pooled, QUANTILE_LEVELS, method="linear")
    values = np.maximum.accumulate(values)

    quantiles = [
        TcQuantile(level=level, ordinal=float(v), date=ordinal_to_date(series, max(float(v), 0.0)))
        for level, v in zip(QUANTILE_LEVELS, values)
    ]
    fraction = len(samples) / len(scan.records) if scan.records else 0.0
    return TcForecast(
        q05=quantiles[0],
        q20=quantiles[1],
        q50=quantiles[2],
        q80=quantiles[3],
        q95=quantiles[4],
        n_qualified=len(samples),
        n_windows=len(scan.records),
        bootstrap_reps=bootstrap_reps,
        seed=seed,
        qualified_fraction=fraction,
        low_confidence=fraction < LOW_CONFIDENCE_FRACTION,
    )


def gap_series(scan: WindowScan) -> GapSeries:
    """tc - t2 per qualified expanding-window fit, with its rank trend and slope"""
    if scan.spec.mode != ScanMode.EXPANDING:
        raise ScanSpecError("the gap indicator needs an expanding scan")
    points = [
        GapPoint(t2=r.window.t2, t2_date=r.t2_date, gap=r.outcome.best.gap)
        for r in scan.records if r.qualified
    ]
    if len(points) < 3:
        raise InsufficientFitsError(f"{len(points)} qualified fits, need at least 3 for a gap trend")

    t2 = np.array([p.t2 for p in points], dtype=float)
    gap = np.array([p.gap for p in points], dtype=float)
    if np.ptp(gap) == 0.0:
        rho = 0.0
    else:
        rho = float(stats.spearmanr(t2, gap).correlation)
        if not math.isfinite(rho):
            rho = 0.0
    slope = float(stats.linregress(t2, gap).slope)
    return GapSeries(points=points, spearman=rho, change_rate=slope)


def m_series(scan: WindowScan) -> List[MPoint]:
    """Exponent m per qualified fit in window order"""
    points = [
        MPoint(t2=r.window.t2, t2_date=r.t2_date, m=r.outcome.best.nonlinear.m)
        for r in scan.records if r.qualified
    ]
    if len(points) < 2:
        raise InsufficientFitsError(f"{len(points)} qualified fits, need at least 2")
    return points
