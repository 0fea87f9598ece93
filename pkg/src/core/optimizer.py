"""
Window calibration: CMA-ES restarts over the profiled LPPLS cost
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

from .cmaes import CmaesConfig, cmaes_minimize
from ..errors import FitFailedError, WindowTooShortError
from .lppls import (
    CONDITION_THRESHOLD,
    COST_SENTINEL,
    check_filters,
    cost_vector,
    solve_linear,
)
from ..data.timeseries import ordinal_to_date, window_data
from ..models.lppls import FilterConditions, FitOutcome, LpplsFit, NonlinearParams, RestartResult
from ..models.price_series import PriceSeries, Window

logger = logging.getLogger(__name__)

# tc - tau_N stays strictly positive
TC_OFFSET = 0.01
MIN_WINDOW_LENGTH = 30
MIN_GRID_RESOLUTION = 8


@dataclass
class SearchBox:
    """Per-window bounds on (tc, m, omega)"""
    tc_range: Tuple[float, float]
    m_range: Tuple[float, float] = (0.1, 0.9)
    omega_range: Tuple[float, float] = (6.0, 13.0)

    @classmethod
    def for_window(cls, window: Window, conditions: Optional[FilterConditions] = None) -> "SearchBox":
        conditions = conditions or FilterConditions()
        return cls(
            tc_range=(window.t2 + TC_OFFSET, conditions.tc_upper(window)),
            m_range=(conditions.m_min, conditions.m_max),
            omega_range=(conditions.omega_min, conditions.omega_max),
        )

    def as_bounds(self) -> np.ndarray:
        return np.array([self.tc_range, self.m_range, self.omega_range], dtype=float)

    def contains(self, nl: NonlinearParams) -> bool:
        bounds = self.as_bounds()
        x = nl.as_vector()
        return bool(np.all((x >= bounds[:, 0]) & (x <= bounds[:, 1])))


class LandscapePair(str, Enum):
    TC_M = "tc-m"
    TC_OMEGA = "tc-omega"
    M_OMEGA = "m-omega"

    @property
    def axes(self) -> Tuple[int, int]:
        return {"tc-m": (0, 1), "tc-omega": (0, 2), "m-omega": (1, 2)}[self.value]


PARAMETER_NAMES = ("tc", "m", "omega")


class GridSlice(BaseModel):
    """Profiled cost on a 2-D grid; costs[i][j] is at (x_values[i], y_values[j])"""

    pair: LandscapePair
    window: Window
    fixed_name: str
    fixed_value: float
    x_values: List[float]
    y_values: List[float]
    costs: List[List[float]]

    @property
    def x_name(self) -> str:
        return PARAMETER_NAMES[self.pair.axes[0]]

    @property
    def y_name(self) -> str:
        return PARAMETER_NAMES[self.pair.axes[1]]

    def argmin(self) -> Tuple[float, float, float]:
        grid = np.asarray(self.costs)
        i, j = np.unravel_index(int(np.argmin(grid)), grid.shape)
        return self.x_values[i], self.y_values[j], float(grid[i, j])

    def to_frame(self) -> pd.DataFrame:
        """Row-major (x outer, y inner) long table"""
        xs, ys = np.meshgrid(self.x_values, self.y_values, indexing="ij")
        return pd.DataFrame({
            self.x_name: xs.ravel(),
            self.y_name: ys.ravel(),
            "cost": np.asarray(self.costs).ravel(),
        })


def fit_window(series: PriceSeries, window: Window, config: Optional[CmaesConfig] = None,
               conditions: Optional[FilterConditions] = None,
               min_length: int = MIN_WINDOW_LENGTH,
               condition_threshold: float = CONDITION_THRESHOLD) -> FitOutcome:
    """
    Calibrate the model on one window

    Runs config.restarts independent CMA-ES searches seeded seed, seed+1, ...,
    completes the best point with the exact linear solve and evaluates the filters.
    Ties between restarts go to the lower restart index.

    Raises:
        WindowTooShortError: fewer than min_length trading days
        FitFailedError: every restart ended on a degenerate basis
    """
    config = config or CmaesConfig()
    conditions = conditions or FilterConditions()
    if window.length < min_length:
        raise WindowTooShortError(f"window {window} has {window.length} trading days, need {min_length}")

    tau, y = window_data(series, window)
    box = SearchBox.for_window(window, conditions)
    bounds = box.as_bounds()

    def objective(x: np.ndarray) -> float:
        return cost_vector(x, tau, y, condition_threshold)

    restarts: List[RestartResult] = []
    evaluations = 0
    best_index = None
    for k in range(config.restarts):
        seed = config.seed + k
        result = cmaes_minimize(objective, bounds, config, seed=seed)
        evaluations += result.evaluations
        restarts.append(RestartResult(
            nonlinear=NonlinearParams.from_vector(result.x),
            sse=result.fun,
            seed=seed,
        ))
        if result.fun >= COST_SENTINEL:
            logger.debug(f"Restart {k} on window {window} ended degenerate")
            continue
        if best_index is None or result.fun < restarts[best_index].sse:
            best_index = k

    if best_index is None:
        raise FitFailedError(f"all {config.restarts} restarts degenerate on window {window}")

    best = restarts[best_index]
    linear, _ = solve_linear(best.nonlinear, tau, y, condition_threshold)
    fit = LpplsFit(
        window=window,
        nonlinear=best.nonlinear,
        linear=linear,
        sse=best.sse,
        seed=best.seed,
        tc_date=ordinal_to_date(series, best.nonlinear.tc),
    )
    fit = fit.model_copy(update={"filter": check_filters(fit, conditions)})
    logger.info(f"Fitted {fit}")
    return FitOutcome(best=fit, all_restarts=restarts, evaluations=evaluations)


def grid_slice(series: PriceSeries, window: Window, pair: LandscapePair, resolution: int,
               fit: LpplsFit, conditions: Optional[FilterConditions] = None,
               condition_threshold: float = CONDITION_THRESHOLD) -> GridSlice:
    """
    Profiled cost over two nonlinear parameters spanning the search box

    The third parameter is held at its value in fit.
    """
    if resolution < MIN_GRID_RESOLUTION:
        raise ValueError(f"resolution must be at least {MIN_GRID_RESOLUTION}, got {resolution}")
    pair = LandscapePair(pair)
    tau, y = window_data(series, window)
    bounds = SearchBox.for_window(window, conditions).as_bounds()
    ix, iy = pair.axes
    fixed = ({0, 1, 2} - {ix, iy}).pop()

    x_values = np.linspace(bounds[ix, 0], bounds[ix, 1], resolution)
    y_values = np.linspace(bounds[iy, 0], bounds[iy, 1], resolution)
    point = fit.nonlinear.as_vector()
    costs = np.empty((resolution, resolution))
    for i, xv in enumerate(x_values):
        for j, yv in enumerate(y_values):
            point[ix], point[iy] = xv, yv
            costs[i, j] = cost_vector(point, tau, y, condition_threshold)

    return GridSlice(
        pair=pair,
        window=window,
        fixed_name=PARAMETER_NAMES[fixed],
        fixed_value=float(fit.nonlinear.as_vector()[fixed]),
        x_values=x_values.tolist(),
        y_values=y_values.tolist(),
        costs=costs.tolist(),
    )
