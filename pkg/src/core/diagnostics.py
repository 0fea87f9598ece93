"""
Residual diagnostics for qualified fits

Lomb periodograms of the parametrically detrended residuals test for
log-periodicity; Dickey-Fuller and Phillips-Perron unit-root tests on the raw
fit residuals test the mean-reverting (O-U) residual property.
"""
import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np
from arch.unitroot import ADF, PhillipsPerron
from scipy.signal import lombscargle

from ..errors import DegenerateInputError, DomainError, LpplsError
from .lppls import residuals as fit_residuals
from ..data.timeseries import window_data
from ..models.diagnostics import (
    DetrendedResiduals,
    HarmonicEntry,
    HarmonicReport,
    LombGrid,
    LombResult,
    RejectionSummary,
    UnitRootReport,
    UnitRootResult,
    WindowUnitRoot,
)
from ..models.lppls import LpplsFit
from ..models.price_series import PriceSeries, Window
from ..models.scan import WindowScan

logger = logging.getLogger(__name__)

MIN_LOMB_SAMPLES = 8
MIN_UNIT_ROOT_OBS = 25
LEVELS = (0.05, 0.01)


def detrend(fit: LpplsFit, tau: np.ndarray, y: np.ndarray) -> DetrendedResiduals:
    """r = (tc - tau)^-m (ln p - A - B (tc - tau)^m) on x = ln(tc - tau)"""
    nl, lin = fit.nonlinear, fit.linear
    dt = nl.tc - np.asarray(tau, dtype=float)
    if np.any(dt <= 0):
        raise DomainError(f"tc={nl.tc} must exceed every sample time")
    f = dt ** nl.m
    r = (np.asarray(y, dtype=float) - lin.A - lin.B * f) / f
    return DetrendedResiduals(x=np.log(dt).tolist(), r=r.tolist())


def false_alarm_probability(p_max: float, independent_frequencies: int) -> float:
    """1 - (1 - exp(-z))^M; a peak of zero power is never significant"""
    if p_max <= 0.0:
        return 1.0
    value = -math.expm1(independent_frequencies * math.log1p(-math.exp(-p_max)))
    return min(max(value, 0.0), 1.0)


def lomb(residuals: DetrendedResiduals, grid: Optional[LombGrid] = None,
         omega_fit: Optional[float] = None) -> LombResult:
    """
    Normalized Lomb periodogram over the irregular x axis

    Power is the classic Lomb estimate (with the time-offset term) of the
    mean-subtracted series divided by its sample variance.
    """
    grid = grid or LombGrid()
    x = np.asarray(residuals.x, dtype=float)
    r = np.asarray(residuals.r, dtype=float)
    if len(r) < MIN_LOMB_SAMPLES:
        raise DegenerateInputError(f"{len(r)} samples, need at least {MIN_LOMB_SAMPLES}")
    if not np.all(np.isfinite(r)):
        raise DegenerateInputError("residuals contain non-finite values")
    if np.ptp(r) == 0.0:
        raise DegenerateInputError("residuals have zero variance")
    variance = np.var(r, ddof=1)
    if not variance > 0:
        raise DegenerateInputError("residuals have zero variance")

    frequencies = np.linspace(grid.omega_min, grid.omega_max, grid.points)
    power = lombscargle(x, r - r.mean(), frequencies) / variance
    power = np.maximum(power, 0.0)
    peak = int(np.argmax(power))
    omega_lomb = float(frequencies[peak])
    p_max = float(power[peak])

    return LombResult(
        frequencies=frequencies.tolist(),
        power=power.tolist(),
        omega_lomb=omega_lomb,
        p_max=p_max,
        false_alarm=false_alarm_probability(p_max, grid.points),
        omega_fit=omega_fit,
        ratio=None if omega_fit is None else omega_fit / omega_lomb,
    )


def lomb_for_fit(fit: LpplsFit, series: PriceSeries, grid: Optional[LombGrid] = None) -> LombResult:
    tau, y = window_data(series, fit.window)
    return lomb(detrend(fit, tau, y), grid, omega_fit=fit.nonlinear.omega)


def harmonic_check(scan: WindowScan, series: PriceSeries, grid: Optional[LombGrid] = None,
                   ratio_low: float = 1.6, ratio_high: float = 2.4) -> HarmonicReport:
    """
    Compare omega_fit with the Lomb peak of every qualified fit

    Ratios near 2 mean the fit locked onto the second harmonic of a
    fundamental below the omega search range.
    """
    entries: List[HarmonicEntry] = []
    failures = {}
    for fit in scan.qualified:
        try:
            result = lomb_for_fit(fit, series, grid)
        except LpplsError as e:
            logger.warning(f"Lomb analysis failed on window {fit.window}: {e}")
            failures[str(fit.window)] = str(e)
            continue
        entries.append(HarmonicEntry(
            window=fit.window,
            omega_lomb=result.omega_lomb,
            omega_fit=fit.nonlinear.omega,
            ratio=result.ratio,
            inverse_ratio=result.omega_lomb / fit.nonlinear.omega,
            p_max=result.p_max,
            false_alarm=result.false_alarm,
        ))

    in_band = sum(1 for e in entries if ratio_low <= e.ratio <= ratio_high)
    return HarmonicReport(
        entries=entries,
        ratio_low=ratio_low,
        ratio_high=ratio_high,
        fraction_in_band=in_band / len(entries) if entries else 0.0,
        failures=failures,
    )


def _validate_series(values) -> np.ndarray:
    y = np.asarray(values, dtype=float)
    if len(y) < MIN_UNIT_ROOT_OBS:
        raise DegenerateInputError(f"{len(y)} observations, need at least {MIN_UNIT_ROOT_OBS}")
    if not np.all(np.isfinite(y)):
        raise DegenerateInputError("series contains non-finite values")
    if np.ptp(y) == 0.0:
        raise DegenerateInputError("series has zero variance")
    return y


def _decision(test, lags: int) -> UnitRootResult:
    critical = test.critical_values
    statistic = float(test.stat)
    return UnitRootResult(
        statistic=statistic,
        critical_05=float(critical["5%"]),
        critical_01=float(critical["1%"]),
        reject_at_05=bool(statistic < critical["5%"]),
        # the 1% value lies below the 5% value, so this implies reject_at_05
        reject_at_01=bool(statistic < critical["1%"]),
        nobs=int(test.nobs),
        lags=lags,
    )


def adf_test(residuals, lags: int = 0) -> UnitRootResult:
    """Dickey-Fuller regression with intercept and no trend; rejection means stationary"""
    y = _validate_series(residuals)
    return _decision(ADF(y, lags=lags, trend="c"), lags)


def default_bandwidth(nobs: int) -> int:
    return int(math.floor(4 * (nobs / 100.0) ** (2.0 / 9.0)))


def pp_test(residuals, bandwidth: Optional[int] = None) -> UnitRootResult:
    """Phillips-Perron Z-tau with a Bartlett-kernel long-run variance"""
    y = _validate_series(residuals)
    if bandwidth is None:
        bandwidth = default_bandwidth(len(y))
    return _decision(PhillipsPerron(y, lags=bandwidth, trend="c", test_type="tau"), bandwidth)


def build_unit_root_report(samples: Iterable[Tuple[Window, np.ndarray]], lags: int = 0,
                           bandwidth: Optional[int] = None) -> UnitRootReport:
    """Both tests per (window, residual series) plus rejection percentages"""
    windows: List[WindowUnitRoot] = []
    failures = {}
    for window, values in samples:
        try:
            windows.append(WindowUnitRoot(
                window=window,
                pp=pp_test(values, bandwidth),
                adf=adf_test(values, lags),
            ))
        except LpplsError as e:
            logger.warning(f"Unit-root tests failed on window {window}: {e}")
            failures[str(window)] = str(e)

    summary = []
    for level in LEVELS:
        if windows:
            attr = "reject_at_05" if level == 0.05 else "reject_at_01"
            pp = 100.0 * sum(getattr(w.pp, attr) for w in windows) / len(windows)
            adf = 100.0 * sum(getattr(w.adf, attr) for w in windows) / len(windows)
        else:
            pp = adf = 0.0
        summary.append(RejectionSummary(level=level, pp_percent=pp, adf_percent=adf))
    return UnitRootReport(windows=windows, summary=summary, failures=failures)


def unit_root_report(scan: WindowScan, series: PriceSeries, lags: int = 0,
                     bandwidth: Optional[int] = None) -> UnitRootReport:
    """Unit-root tests on the raw residuals ln p - LPPLS of every qualified fit"""
    samples = []
    for fit in scan.qualified:
        tau, y = window_data(series, fit.window)
        samples.append((fit.window, fit_residuals(fit, tau, y)))
    return build_unit_root_report(samples, lags, bandwidth)
