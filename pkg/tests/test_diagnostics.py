"""
Tests for detrended residuals, Lomb periodograms and unit-root checks
"""
import numpy as np
import pytest

from src.core.diagnostics import (
    adf_test,
    build_unit_root_report,
    default_bandwidth,
    detrend,
    false_alarm_probability,
    harmonic_check,
    lomb,
    pp_test,
    unit_root_report,
)
from src.core.lppls import synthesize
from src.data.timeseries import window_data
from src.errors import DegenerateInputError, DomainError
from src.models.diagnostics import DetrendedResiduals, LombGrid
from src.models.lppls import LinearParams, NonlinearParams, Tone
from src.models.price_series import Window
from tests.conftest import make_fit, make_scan

GRID = LombGrid()
LONG_WINDOW = Window(t1=0, t2=999)


def ar1(phi, n, rng):
    x = np.empty(n)
    x[0] = rng.normal() / np.sqrt(1 - phi ** 2)
    for i in range(1, n):
        x[i] = phi * x[i - 1] + rng.normal()
    return x


class TestDetrend:
    nl = NonlinearParams(tc=160.0, m=0.4, omega=9.0)
    window = Window(t1=0, t2=149)

    def residuals_for(self, linear, series=None):
        if series is None:
            series = synthesize(self.nl, linear, self.window)
        fit = make_fit(self.window, tc=self.nl.tc, m=self.nl.m, omega=self.nl.omega, linear=linear)
        tau, y = window_data(series, self.window)
        return detrend(fit, tau, y), tau

    def test_pure_power_law(self):
        residuals, _ = self.residuals_for(LinearParams(A=5.0, B=-0.3, C1=0.0, C2=0.0))
        assert np.max(np.abs(residuals.r)) <= 1e-10

    def test_cosine_component(self):
        residuals, _ = self.residuals_for(LinearParams(A=5.0, B=-0.3, C1=0.05, C2=0.0))
        x = np.asarray(residuals.x)
        assert np.allclose(residuals.r, 0.05 * np.cos(9.0 * x), atol=1e-8)

    def test_local_perturbation(self):
        linear = LinearParams(A=5.0, B=-0.3, C1=0.05, C2=0.0)
        series = synthesize(self.nl, linear, self.window)
        base, tau = self.residuals_for(linear, series)
        prices = list(series.prices)
        delta = 0.01
        prices[42] *= np.exp(delta)
        bumped, _ = self.residuals_for(linear, series.model_copy(update={"prices": prices}))
        change = np.asarray(bumped.r) - np.asarray(base.r)
        expected = np.zeros_like(change)
        expected[42] = delta * (self.nl.tc - tau[42]) ** (-self.nl.m)
        assert np.allclose(change, expected, atol=1e-12)

    def test_tc_inside_window(self):
        fit = make_fit(self.window, tc=100.0)
        with pytest.raises(DomainError):
            detrend(fit, self.window.tau, np.zeros(self.window.length))


class TestLomb:
    def test_uniform_tone(self):
        x = np.linspace(0.0, 10.0, 200)
        result = lomb(DetrendedResiduals(x=x.tolist(), r=np.cos(9.0 * x).tolist()), GRID)
        assert abs(result.omega_lomb - 9.0) <= GRID.spacing
        assert len(result.frequencies) == 512

    def test_jittered_tone(self):
        rng = np.random.default_rng(5)
        x = np.sort(np.linspace(0.0, 10.0, 200) + rng.uniform(-0.02, 0.02, 200))
        result = lomb(DetrendedResiduals(x=x.tolist(), r=np.cos(9.0 * x).tolist()), GRID, omega_fit=9.0)
        assert abs(result.omega_lomb - 9.0) <= GRID.spacing
        assert result.false_alarm < 1e-5
        assert result.ratio == pytest.approx(1.0, abs=0.01)

    def test_noise_not_significant(self):
        rng = np.random.default_rng(1)
        x = np.linspace(0.0, 10.0, 200)
        result = lomb(DetrendedResiduals(x=x.tolist(), r=rng.normal(size=200).tolist()), GRID)
        assert result.false_alarm > 1e-3

    def test_zero_variance(self):
        x = np.linspace(0.0, 10.0, 50)
        with pytest.raises(DegenerateInputError):
            lomb(DetrendedResiduals(x=x.tolist(), r=[0.3] * 50))

    def test_too_few_samples(self):
        with pytest.raises(DegenerateInputError):
            lomb(DetrendedResiduals(x=[0.0, 1.0, 2.0], r=[1.0, -1.0, 1.0]))

    def test_false_alarm_probability(self):
        assert false_alarm_probability(0.0, 512) == 1.0
        assert false_alarm_probability(50.0, 512) < 1e-15
        assert false_alarm_probability(10.0, 512) == pytest.approx(1 - (1 - np.exp(-10.0)) ** 512)
        assert false_alarm_probability(-1e-18, 512) == 1.0

    def test_constant_with_rounding_noise(self):
        # var(ddof=1) of these values is a few 1e-33, not exactly zero
        x = np.linspace(0.0, 10.0, 64)
        for level in (0.3, 0.1, 1.7):
            with pytest.raises(DegenerateInputError):
                lomb(DetrendedResiduals(x=x.tolist(), r=[level] * 64))

    def test_non_finite_residuals(self):
        r = np.sin(np.linspace(0.0, 10.0, 50))
        r[3] = np.nan
        with pytest.raises(DegenerateInputError):
            lomb(DetrendedResiduals(x=np.linspace(0.0, 10.0, 50).tolist(), r=r.tolist()))


class TestHarmonicCheck:
    def scan_for(self, omega_fit, harmonics=()):
        nl = NonlinearParams(tc=1005.0, m=0.5, omega=omega_fit)
        linear = LinearParams(A=8.0, B=-0.5, C1=0.01, C2=0.0)
        series = synthesize(nl, linear, LONG_WINDOW, harmonics=harmonics)
        fit = make_fit(LONG_WINDOW, tc=nl.tc, m=nl.m, omega=nl.omega, linear=linear)
        assert fit.qualified
        return make_scan([fit], series), series

    def test_single_tone(self):
        scan, series = self.scan_for(9.0)
        report = harmonic_check(scan, series, GRID)
        assert len(report.entries) == 1
        assert report.entries[0].ratio == pytest.approx(1.0, abs=0.02)

    def test_fundamental_below_fit_range(self):
        scan, series = self.scan_for(8.0, harmonics=[Tone(omega=4.0, C1=0.05)])
        report = harmonic_check(scan, series, GRID)
        entry = report.entries[0]
        assert entry.omega_fit == 8.0
        assert entry.omega_lomb == pytest.approx(4.0, abs=0.4)
        assert 1.8 <= entry.ratio <= 2.2
        assert entry.inverse_ratio == pytest.approx(1.0 / entry.ratio)
        assert report.fraction_in_band == 1.0

    def test_no_qualified_fits(self, bubble_series):
        fit = make_fit(Window(t1=0, t2=200), tc=230.0, m=0.05)
        report = harmonic_check(make_scan([fit], bubble_series), bubble_series, GRID)
        assert report.entries == []
        assert report.fraction_in_band == 0.0


class TestUnitRoot:
    def test_default_bandwidth(self):
        assert default_bandwidth(100) == 4
        assert default_bandwidth(200) == 4
        assert default_bandwidth(1000) == 6

    def test_stationary_rejects(self):
        result = adf_test(ar1(0.5, 200, np.random.default_rng(0)))
        assert result.reject_at_05
        assert type(result.reject_at_05) is bool
        assert type(result.reject_at_01) is bool
        assert result.critical_01 < result.critical_05 < 0
        assert result.lags == 0

    def test_pp_uses_bandwidth(self):
        series = ar1(0.5, 200, np.random.default_rng(0))
        assert pp_test(series).lags == 4
        assert pp_test(series, bandwidth=7).lags == 7

    def test_constant_series(self):
        with pytest.raises(DegenerateInputError):
            adf_test(np.ones(100))
        with pytest.raises(DegenerateInputError):
            pp_test(np.ones(100))

    def test_short_series(self):
        with pytest.raises(DegenerateInputError):
            adf_test(np.arange(10.0))

    @pytest.mark.slow
    @pytest.mark.parametrize("test", [adf_test, pp_test])
    def test_power_and_size(self, test):
        trials = 1000
        power = sum(test(ar1(0.5, 200, np.random.default_rng(seed))).reject_at_05 for seed in range(trials))
        size = sum(
            test(np.cumsum(np.random.default_rng(10_000 + seed).normal(size=200))).reject_at_05
            for seed in range(trials)
        )
        assert power >= 0.95 * trials
        assert size <= 0.08 * trials

    def test_report_on_random_walks(self):
        samples = [
            (Window(t1=0, t2=199), np.cumsum(np.random.default_rng(seed).normal(size=200)))
            for seed in range(100)
        ]
        report = build_unit_root_report(samples)
        assert report.percent("pp", 0.05) <= 10.0
        assert report.percent("adf", 0.05) <= 10.0

    def test_single_window_is_all_or_nothing(self):
        report = build_unit_root_report([(Window(t1=0, t2=199), ar1(0.3, 200, np.random.default_rng(2)))])
        for row in report.summary:
            assert row.pp_percent in (0.0, 100.0)
            assert row.adf_percent in (0.0, 100.0)

    def test_failures_recorded(self):
        report = build_unit_root_report([(Window(t1=0, t2=9), np.arange(10.0))])
        assert report.windows == []
        assert list(report.failures) == ["[0, 9]"]

    def test_ou_residuals_of_scan(self):
        nl = NonlinearParams(tc=330.0, m=0.5, omega=9.0)
        linear = LinearParams(A=8.0, B=-0.5, C1=0.01, C2=0.01)
        series = synthesize(nl, linear, Window(t1=0, t2=299), {"kind": "ou", "phi": 0.5, "sigma": 0.01}, seed=3)
        fits = [make_fit(Window(t1=0, t2=t2), tc=330.0, linear=linear) for t2 in (260, 275, 290, 299)]
        report = unit_root_report(make_scan(fits, series), series)
        assert len(report.windows) == 4
        assert report.percent("pp", 0.05) == 100.0
        assert report.percent("adf", 0.01) == 100.0
