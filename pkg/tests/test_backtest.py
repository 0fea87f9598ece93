"""
Back-tests of the 2015 SSEC and SZSC bubbles on the bundled index closes

Skipped unless data/ssec_2014_2015.csv and data/szsc_2014_2015.csv are present.
"""
import os
from datetime import date

import pytest

from src.core.cmaes import CmaesConfig
from src.core.diagnostics import harmonic_check, unit_root_report
from src.core.windows import forecast_tc, gap_series, run_scan
from src.data.timeseries import load_csv, resolve_ordinal
from src.models.scan import ScanMode, ScanSpec
from tests.conftest import SSEC_CSV, SZSC_CSV, requires_ssec, requires_szsc

pytestmark = pytest.mark.slow

SEED = 7
JOBS = os.cpu_count() or 1
TOLERANCE_DAYS = 5

EXPANDING = ScanSpec(mode=ScanMode.EXPANDING, fixed_end=date(2014, 11, 3),
                     moving_start=date(2015, 3, 27), moving_end=date(2015, 6, 10), step=3)
SHRINKING = ScanSpec(mode=ScanMode.SHRINKING, fixed_end=date(2015, 4, 20),
                     moving_start=date(2014, 1, 2), moving_end=date(2015, 1, 30), step=3)


def scan_and_forecast(series, spec):
    scan = run_scan(series, spec, CmaesConfig(seed=SEED), jobs=JOBS)
    return scan, forecast_tc(scan, series, bootstrap_reps=1000, seed=SEED)


def assert_near(series, quantile, expected: date):
    target = resolve_ordinal(series, expected, snap="forward")
    assert abs(quantile.ordinal - target) <= TOLERANCE_DAYS, f"{quantile.date} vs {expected}"


@pytest.fixture(scope="module")
def ssec():
    return load_csv(SSEC_CSV)


@pytest.fixture(scope="module")
def szsc():
    return load_csv(SZSC_CSV)


@pytest.fixture(scope="module")
def ssec_expanding(ssec):
    return scan_and_forecast(ssec, EXPANDING)


@pytest.fixture(scope="module")
def ssec_shrinking(ssec):
    return run_scan(ssec, SHRINKING, CmaesConfig(seed=SEED), jobs=JOBS)


@pytest.fixture(scope="module")
def szsc_expanding(szsc):
    return scan_and_forecast(szsc, EXPANDING)


@pytest.fixture(scope="module")
def szsc_shrinking(szsc):
    return run_scan(szsc, SHRINKING, CmaesConfig(seed=SEED), jobs=JOBS)


@requires_ssec
class TestSsecExpanding:
    def test_qualified_count(self, ssec_expanding):
        scan, _ = ssec_expanding
        assert len(scan.records) == 18
        assert 14 <= scan.n_qualified <= 18

    def test_quantile_ranges(self, ssec, ssec_expanding):
        _, forecast = ssec_expanding
        assert_near(ssec, forecast.q20, date(2015, 6, 2))
        assert_near(ssec, forecast.q80, date(2015, 7, 3))
        assert_near(ssec, forecast.q05, date(2015, 5, 19))
        assert_near(ssec, forecast.q95, date(2015, 7, 9))

    def test_peak_inside_forecast(self, ssec_expanding):
        _, forecast = ssec_expanding
        assert forecast.q05.date <= date(2015, 6, 12) <= forecast.q95.date

    def test_gap_decreases(self, ssec_expanding):
        scan, _ = ssec_expanding
        assert gap_series(scan).spearman < 0

    def test_lomb_peaks_significant(self, ssec, ssec_expanding):
        scan, _ = ssec_expanding
        report = harmonic_check(scan, ssec)
        assert not report.failures
        assert len(report.entries) == scan.n_qualified
        assert all(entry.false_alarm < 1e-5 for entry in report.entries)

    def test_unit_root_rejections(self, ssec, ssec_expanding):
        scan, _ = ssec_expanding
        report = unit_root_report(scan, ssec)
        for level in (0.05, 0.01):
            assert report.percent("pp", level) == 100.0
            assert report.percent("adf", level) == 100.0


@requires_ssec
class TestSsecShrinking:
    def test_window_count(self, ssec_shrinking):
        assert len(ssec_shrinking.records) == 89

    def test_unit_root_rejections(self, ssec, ssec_shrinking):
        report = unit_root_report(ssec_shrinking, ssec)
        expected = {("pp", 0.05): 96.0, ("adf", 0.05): 100.0, ("pp", 0.01): 92.0, ("adf", 0.01): 97.0}
        for (test, level), percent in expected.items():
            assert report.percent(test, level) == pytest.approx(percent, abs=6.0), (test, level)


@requires_szsc
class TestSzscExpanding:
    def test_quantile_range(self, szsc, szsc_expanding):
        _, forecast = szsc_expanding
        assert_near(szsc, forecast.q20, date(2015, 6, 9))
        assert_near(szsc, forecast.q80, date(2015, 6, 24))

    def test_lomb_peaks_significant(self, szsc, szsc_expanding):
        scan, _ = szsc_expanding
        report = harmonic_check(scan, szsc)
        assert not report.failures
        assert all(entry.false_alarm < 1e-5 for entry in report.entries)


@requires_szsc
class TestSzscShrinking:
    def test_qualified_count(self, szsc_shrinking):
        assert len(szsc_shrinking.records) == 89
        assert 71 <= szsc_shrinking.n_qualified <= 79

    def test_lomb_peaks_significant(self, szsc, szsc_shrinking):
        report = harmonic_check(szsc_shrinking, szsc)
        assert all(entry.false_alarm < 1e-5 for entry in report.entries)
