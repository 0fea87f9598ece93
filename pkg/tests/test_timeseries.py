"""
Tests for CSV ingestion, ordinal resolution and slicing
"""
from datetime import date

import numpy as np
import pytest

from src.data.timeseries import (
    load_csv,
    ordinal_to_date,
    resolve_ordinal,
    slice_series,
    window_data,
)
from src.errors import SeriesValidationError, WindowTooShortError
from src.models.price_series import PriceSeries, Window

ROWS = [("2014-01-02", 2100.0), ("2014-01-03", 2083.1), ("2014-01-06", 2045.7)]


class TestLoadCsv:
    def test_three_rows(self, write_prices):
        series = load_csv(write_prices(ROWS))
        assert series.dates == [date(2014, 1, 2), date(2014, 1, 3), date(2014, 1, 6)]
        assert series.prices == [2100.0, 2083.1, 2045.7]
        assert list(series.ordinals) == [0, 1, 2]
        assert series.label == "prices"

    def test_shuffled_rows_sorted(self, write_prices):
        ordered = load_csv(write_prices(ROWS, "a.csv"))
        shuffled = load_csv(write_prices([ROWS[2], ROWS[0], ROWS[1]], "b.csv"), label="a")
        assert shuffled.dates == ordered.dates
        assert shuffled.prices == ordered.prices

    def test_negative_price_names_row(self, write_prices):
        rows = [ROWS[0], ("2014-01-03", -5.0), ROWS[2]]
        with pytest.raises(SeriesValidationError, match="row 2") as excinfo:
            load_csv(write_prices(rows))
        assert excinfo.value.row == 2

    def test_bad_date(self, write_prices):
        with pytest.raises(SeriesValidationError, match="row 3"):
            load_csv(write_prices(ROWS[:2] + [("2014/01/06", 1.0)]))

    def test_duplicate_date(self, write_prices):
        with pytest.raises(SeriesValidationError, match="duplicate"):
            load_csv(write_prices(ROWS + [("2014-01-03", 2000.0)]))

    def test_missing_column(self, write_prices):
        with pytest.raises(SeriesValidationError, match="close"):
            load_csv(write_prices(ROWS, header="date,price"))

    def test_custom_columns_and_comments(self, tmp_path):
        path = tmp_path / "idx.csv"
        path.write_text("# exported\nDay,Close\n2014-01-02,10\n2014-01-03,11\n")
        series = load_csv(path, date_column="Day", price_column="Close")
        assert series.size == 2
        assert series.log_prices[1] == pytest.approx(np.log(11.0))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SeriesValidationError, match="no header"):
            load_csv(path)

    def test_binary_file(self, tmp_path):
        path = tmp_path / "prices.xlsx"
        path.write_bytes(b"\xff\xfe\x00PK\x03\x04\x80\x81")
        with pytest.raises(SeriesValidationError):
            load_csv(path)


class TestSlicing:
    def test_full_range(self, synthetic_series):
        window, y = slice_series(synthetic_series, 0, synthetic_series.last_ordinal)
        assert len(y) == synthetic_series.size
        assert window.length == synthetic_series.size

    def test_minimal_window(self, synthetic_series):
        window, y = slice_series(synthetic_series, 99, 100)
        assert len(y) == 2
        assert (window.t1, window.t2) == (99, 100)

    def test_constant_price(self, flat_series):
        _, y = slice_series(flat_series, 0, 39)
        assert np.allclose(y, np.log(100.0))

    def test_dates_snap_inward(self, flat_series):
        # 2015-01-10 is a Saturday
        assert resolve_ordinal(flat_series, "2015-01-10", snap="forward") == 5
        assert resolve_ordinal(flat_series, "2015-01-10", snap="backward") == 4
        assert resolve_ordinal(flat_series, date(2015, 1, 5)) == 0
        assert resolve_ordinal(flat_series, "7") == 7

    def test_empty_window_rejected(self, flat_series):
        with pytest.raises(WindowTooShortError):
            slice_series(flat_series, 10, 10)

    def test_ordinal_out_of_range(self, flat_series):
        with pytest.raises(WindowTooShortError):
            resolve_ordinal(flat_series, 40)

    def test_invalid_calendar_date(self, flat_series):
        with pytest.raises(SeriesValidationError, match="2015-13-45"):
            resolve_ordinal(flat_series, "2015-13-45")
        with pytest.raises(SeriesValidationError):
            slice_series(flat_series, "yesterday", 20)

    def test_window_data(self, flat_series):
        tau, y = window_data(flat_series, Window(t1=3, t2=9))
        assert list(tau) == [3, 4, 5, 6, 7, 8, 9]
        assert len(y) == 7

    def test_invalid_window(self):
        with pytest.raises(ValueError):
            Window(t1=5, t2=5)


class TestOrdinalToDate:
    @pytest.fixture
    def series(self):
        dates = [date(2015, 6, 1), date(2015, 6, 2), date(2015, 6, 3), date(2015, 6, 4), date(2015, 6, 5)]
        return PriceSeries(dates=dates, prices=[1.0] * 5)

    def test_endpoints(self, series):
        assert ordinal_to_date(series, 0) == date(2015, 6, 1)
        assert ordinal_to_date(series, 4) == date(2015, 6, 5)

    def test_weekdays_past_last_friday(self, series):
        # x = N + 1 is two weekdays past Friday 2015-06-05
        assert ordinal_to_date(series, 6) == date(2015, 6, 9)
        assert ordinal_to_date(series, 5.2) == date(2015, 6, 8)

    def test_rounds_inside_range(self, series):
        assert ordinal_to_date(series, 1.4) == date(2015, 6, 2)
        assert ordinal_to_date(series, 1.6) == date(2015, 6, 3)

    def test_negative_rejected(self, series):
        with pytest.raises(ValueError):
            ordinal_to_date(series, -1)
