"""
Loading, indexing and slicing daily closes on a trading-day ordinal axis
"""
import bisect
import logging
import math
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import pandas as pd
from dateutil.parser import isoparse
from dateutil.rrule import DAILY, FR, MO, TH, TU, WE, rrule

from ..errors import SeriesValidationError, WindowTooShortError
from ..models.price_series import PriceSeries, Window

logger = logging.getLogger(__name__)

DateLike = Union[date, int, float, str]

WEEKDAYS = (MO, TU, WE, TH, FR)


def load_csv(path: Union[str, Path], date_column: str = "date",
             price_column: str = "close", label: str = None) -> PriceSeries:
    """
    Read a comma-separated file of daily closes

    Args:
        path: CSV with a header row; lines starting with '#' are ignored
        date_column: column holding YYYY-MM-DD dates
        price_column: column holding the daily close
        label: series name, defaults to the file stem

    Returns:
        PriceSeries sorted by date with ordinals 0..N-1

    Raises:
        SeriesValidationError: missing column, bad date or price, duplicate date.
            Row numbers count data rows from 1 in file order.
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, comment="#", dtype=str, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise SeriesValidationError(f"{path}: no header or data rows") from e
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise SeriesValidationError(f"{path}: not a readable CSV ({e})") from e

    for column in (date_column, price_column):
        if column not in frame.columns:
            raise SeriesValidationError(f"{path}: missing column '{column}' (have {list(frame.columns)})")

    if frame.empty:
        raise SeriesValidationError(f"{path}: no data rows")

    dates = pd.to_datetime(frame[date_column].str.strip(), format="%Y-%m-%d", errors="coerce")
    prices = pd.to_numeric(frame[price_column], errors="coerce")

    for row, (raw, parsed) in enumerate(zip(frame[date_column], dates), start=1):
        if pd.isna(parsed):
            raise SeriesValidationError(f"unparseable date {raw!r}", row=row)
    for row, (raw, value) in enumerate(zip(frame[price_column], prices), start=1):
        if pd.isna(value) or not np.isfinite(value):
            raise SeriesValidationError(f"unparseable price {raw!r}", row=row)
        if value <= 0:
            raise SeriesValidationError(f"non-positive price {value}", row=row)

    duplicated = dates.duplicated(keep="first")
    if duplicated.any():
        row = int(np.flatnonzero(duplicated.to_numpy())[0]) + 1
        raise SeriesValidationError(f"duplicate date {dates[row - 1].date()}", row=row)

    order = np.argsort(dates.to_numpy(), kind="stable")
    series = PriceSeries(
        dates=[d.date() for d in dates.iloc[order]],
        prices=[float(p) for p in prices.iloc[order]],
        label=label or path.stem,
    )
    logger.info(f"Loaded {series}")
    return series


def _as_date(value) -> date:
    if isinstance(value, datetime):
        return value.date()
    if isinstance(value, date):
        return value
    try:
        return isoparse(str(value).strip()).date()
    except (ValueError, OverflowError) as e:
        raise SeriesValidationError(f"invalid date {value!r}: {e}") from e


def resolve_ordinal(series: PriceSeries, value: DateLike, snap: str = "forward") -> int:
    """
    Map a date or ordinal onto the series' trading-day axis

    Calendar dates that are not trading days snap inward: 'forward' picks the next
    trading day (window starts), 'backward' the previous one (window ends).
    """
    if isinstance(value, str) and value.strip().lstrip("-").isdigit():
        value = int(value)
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        ordinal = int(value)
        if not 0 <= ordinal <= series.last_ordinal:
            raise WindowTooShortError(f"ordinal {ordinal} outside 0..{series.last_ordinal}")
        return ordinal
    if isinstance(value, float):
        ordinal = math.ceil(value) if snap == "forward" else math.floor(value)
        return resolve_ordinal(series, ordinal, snap)

    target = _as_date(value)
    if snap == "forward":
        ordinal = bisect.bisect_left(series.dates, target)
        if ordinal > series.last_ordinal:
            raise WindowTooShortError(f"no trading day on or after {target}")
    else:
        ordinal = bisect.bisect_right(series.dates, target) - 1
        if ordinal < 0:
            raise WindowTooShortError(f"no trading day on or before {target}")
    return ordinal


def slice_series(series: PriceSeries, t1: DateLike, t2: DateLike) -> Tuple[Window, np.ndarray]:
    """Inclusive window [t1, t2] and the log-prices it covers"""
    start = resolve_ordinal(series, t1, snap="forward")
    end = resolve_ordinal(series, t2, snap="backward")
    if start >= end:
        raise WindowTooShortError(f"window {t1} .. {t2} is empty after snapping to trading days")
    window = Window(t1=start, t2=end)
    return window, series.log_prices[start:end + 1]


def window_data(series: PriceSeries, window: Window) -> Tuple[np.ndarray, np.ndarray]:
    """(tau, ln p) pairs for a window"""
    if window.t2 > series.last_ordinal:
        raise WindowTooShortError(f"window {window} extends past ordinal {series.last_ordinal}")
    return window.tau, series.log_prices[window.t1:window.t2 + 1]


def ordinal_to_date(series: PriceSeries, x: float) -> date:
    """
    Calendar date of a real-valued ordinal

    Inside the observed range the nearest trading day is returned. Past the last
    observation, whole steps are taken over Monday-Friday weekdays (holidays ignored).
    """
    if x < 0:
        raise ValueError(f"ordinal must be non-negative, got {x}")
    last = series.last_ordinal
    if x <= last:
        return series.dates[min(int(math.floor(x + 0.5)), last)]

    steps = int(math.floor(x - last + 0.5))
    if steps == 0:
        return series.dates[-1]
    start = datetime.combine(series.dates[-1] + timedelta(days=1), datetime.min.time())
    return rrule(DAILY, byweekday=WEEKDAYS, dtstart=start, count=steps)[-1].date()
