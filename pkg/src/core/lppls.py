"""
The LPPLS log-price model in its (A, B, C1, C2) form

    ln p(t) = A + B f + C1 f cos(omega ln(tc - t)) + C2 f sin(omega ln(tc - t)),  f = (tc - t)^m

The linear parameters are slaved to (tc, m, omega) through an exact least-squares
solve, so every optimizer only ever searches the three nonlinear ones.
"""
import logging
import math
from datetime import date
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import DegenerateBasisError, DomainError, NoiseModelError
from ..models.lppls import (
    BSignRule,
    FilterConditions,
    FilterReport,
    LinearParams,
    LpplsFit,
    NoiseModel,
    NonlinearParams,
    Tone,
)
from ..models.price_series import PriceSeries, Window

logger = logging.getLogger(__name__)

# Larger than any attainable SSE on log-price data: the intercept column alone bounds
# the SSE by sum((y - mean(y))^2).
COST_SENTINEL = 1e10

CONDITION_THRESHOLD = 1e12

# Reported for damping/oscillations when tc does not lie past the window end
FILTER_SENTINEL = -1.0


def evaluate(nl: NonlinearParams, lin: LinearParams, t: Union[float, np.ndarray]):
    """Model log-price at t (scalar or array); every t must precede tc"""
    t_arr = np.asarray(t, dtype=float)
    dt = nl.tc - t_arr
    if np.any(dt <= 0):
        raise DomainError(f"t must be < tc={nl.tc}")
    f = dt ** nl.m
    phase = nl.omega * np.log(dt)
    value = lin.A + lin.B * f + lin.C1 * f * np.cos(phase) + lin.C2 * f * np.sin(phase)
    return float(value) if value.ndim == 0 else value


def design_matrix(nl: NonlinearParams, tau: np.ndarray) -> np.ndarray:
    """Columns 1, f, g = f cos, h = f sin evaluated at tau"""
    dt = nl.tc - np.asarray(tau, dtype=float)
    if np.any(dt <= 0):
        raise DomainError(f"tc={nl.tc} must exceed every sample time (max {np.max(tau)})")
    f = dt ** nl.m
    phase = nl.omega * np.log(dt)
    return np.column_stack((np.ones_like(f), f, f * np.cos(phase), f * np.sin(phase)))


def solve_linear(nl: NonlinearParams, tau: np.ndarray, y: np.ndarray,
                 condition_threshold: float = CONDITION_THRESHOLD) -> Tuple[LinearParams, float]:
    """
    Least-squares (A, B, C1, C2) for fixed (tc, m, omega)

    Solved through the SVD of the N x 4 design matrix rather than the normal
    equations, which square the condition number.

    Raises:
        DomainError: tc does not exceed every tau
        DegenerateBasisError: condition estimate above the threshold
    """
    y = np.asarray(y, dtype=float)
    if len(y) < 4:
        raise DegenerateBasisError(math.inf)
    X = design_matrix(nl, tau)
    if not np.all(np.isfinite(X)):
        raise DegenerateBasisError(math.inf)

    coef, _, rank, singular = np.linalg.lstsq(X, y, rcond=None)
    condition = singular[0] / singular[-1] if singular[-1] > 0 else math.inf
    if rank < 4 or condition > condition_threshold:
        raise DegenerateBasisError(condition)

    residual = y - X @ coef
    sse = float(residual @ residual)
    return LinearParams.from_vector(coef), sse


def cost(nl: NonlinearParams, tau: np.ndarray, y: np.ndarray,
         condition_threshold: float = CONDITION_THRESHOLD) -> float:
    """Profiled SSE F1(tc, m, omega); COST_SENTINEL on degenerate or out-of-domain input"""
    try:
        _, sse = solve_linear(nl, tau, y, condition_threshold)
    except (DegenerateBasisError, DomainError):
        return COST_SENTINEL
    return sse if np.isfinite(sse) else COST_SENTINEL


def cost_vector(x: np.ndarray, tau: np.ndarray, y: np.ndarray,
                condition_threshold: float = CONDITION_THRESHOLD) -> float:
    """cost() on a raw (tc, m, omega) vector, as the optimizer sees it"""
    if x[2] < 0:
        return COST_SENTINEL
    return cost(NonlinearParams.from_vector(x), tau, y, condition_threshold)


def squared_error(nl: NonlinearParams, lin: LinearParams, tau: np.ndarray, y: np.ndarray) -> float:
    """Unprofiled least-squares cost for arbitrary linear parameters"""
    residual = np.asarray(y, dtype=float) - evaluate(nl, lin, tau)
    return float(residual @ residual)


def residuals(fit: LpplsFit, tau: np.ndarray, y: np.ndarray) -> np.ndarray:
    """ln p - LPPLS over the fit window"""
    return np.asarray(y, dtype=float) - evaluate(fit.nonlinear, fit.linear, tau)


def convert_to_original_form(lin: LinearParams) -> Tuple[float, float]:
    """(C, phi) with C1 = C cos(phi), C2 = C sin(phi) and phi in [0, 2 pi)"""
    amplitude = math.hypot(lin.C1, lin.C2)
    phi = math.atan2(lin.C2, lin.C1) % (2.0 * math.pi)
    return amplitude, phi


def check_filters(fit: LpplsFit, conditions: Optional[FilterConditions] = None) -> FilterReport:
    """Evaluate every qualification condition on a completed fit"""
    conditions = conditions or FilterConditions()
    nl, lin, window = fit.nonlinear, fit.linear, fit.window
    t1, t2 = window.t1, window.t2

    m_in_range = conditions.m_min <= nl.m <= conditions.m_max
    omega_in_range = conditions.omega_min <= nl.omega <= conditions.omega_max
    tc_in_range = t2 <= nl.tc <= conditions.tc_upper(window)
    b_negative = lin.B < 0
    b_below_one = lin.B < 1

    if nl.tc <= t2:
        damping = oscillations = FILTER_SENTINEL
        damping_ok = oscillations_ok = False
    else:
        amplitude = math.hypot(lin.C1, lin.C2)
        denominator = nl.omega * amplitude
        numerator = nl.m * abs(lin.B)
        if denominator > 0:
            damping = numerator / denominator
        else:
            damping = math.inf if numerator > 0 else 0.0
        damping_ok = damping >= conditions.damping_min
        oscillations = (nl.omega / math.pi) * math.log((nl.tc - t1) / (nl.tc - t2))
        oscillations_ok = oscillations >= conditions.oscillations_min

    sign_ok = b_negative if conditions.b_sign_rule == BSignRule.NEGATIVE else b_below_one
    qualified = all((m_in_range, omega_in_range, tc_in_range, damping_ok, oscillations_ok, sign_ok))

    return FilterReport(
        m_in_range=m_in_range,
        omega_in_range=omega_in_range,
        tc_in_range=tc_in_range,
        damping=damping if math.isfinite(damping) else 1e308,
        damping_ok=damping_ok,
        oscillations=oscillations,
        oscillations_ok=oscillations_ok,
        b_negative=b_negative,
        b_below_one=b_below_one,
        b_sign_rule=conditions.b_sign_rule,
        qualified=qualified,
    )


def _noise(noise: NoiseModel, size: int, rng: np.random.Generator) -> np.ndarray:
    if noise.kind == "none":
        return np.zeros(size)
    shocks = rng.normal(0.0, noise.sigma, size)
    if noise.kind == "gaussian":
        return shocks
    # AR(1) started from its stationary distribution
    eps = np.empty(size)
    eps[0] = shocks[0] / math.sqrt(1.0 - noise.phi ** 2)
    for i in range(1, size):
        eps[i] = noise.phi * eps[i - 1] + shocks[i]
    return eps


def synthesize(nl: NonlinearParams, lin: LinearParams, window: Window,
               noise: Union[NoiseModel, dict, None] = None, seed: int = 0,
               start_date: Union[date, str] = "2000-01-03",
               harmonics: Sequence[Tone] = ()) -> PriceSeries:
    """
    Price series following the model plus noise on ordinals 0..t2

    Dates are consecutive weekdays from start_date. Extra tones add further
    log-periodic components with the same power-law envelope.

    Raises:
        DomainError: tc <= t2
        NoiseModelError: invalid noise parameters
    """
    if nl.tc <= window.t2:
        raise DomainError(f"tc={nl.tc} must lie beyond the window end {window.t2}")
    if noise is None:
        noise = NoiseModel()
    elif isinstance(noise, dict):
        try:
            noise = NoiseModel(**noise)
        except ValueError as e:
            raise NoiseModelError(str(e)) from e

    tau = np.arange(window.t2 + 1, dtype=float)
    log_price = evaluate(nl, lin, tau)
    if harmonics:
        dt = nl.tc - tau
        f = dt ** nl.m
        for tone in harmonics:
            phase = tone.omega * np.log(dt)
            log_price = log_price + tone.C1 * f * np.cos(phase) + tone.C2 * f * np.sin(phase)

    rng = np.random.default_rng(seed)
    log_price = log_price + _noise(noise, len(tau), rng)

    dates = pd.bdate_range(start=pd.Timestamp(start_date), periods=len(tau))
    logger.debug(f"Synthesized {len(tau)} points, tc={nl.tc}, noise={noise}")
    return PriceSeries(
        dates=[d.date() for d in dates],
        prices=np.exp(log_price).tolist(),
        label="synthetic",
    )
