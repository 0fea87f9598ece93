#!/usr/bin/env python3
"""
Example usage of lppls-scanner with a synthetic bubble
"""
from src.core import CmaesConfig, fit_window, forecast_tc, gap_series, harmonic_check, run_scan, synthesize
from src.models import LinearParams, NoiseModel, NonlinearParams, ScanMode, ScanSpec, Window


def create_sample_data():
    """Synthesize 300 trading days of an accelerating, log-periodic price path"""

    truth = NonlinearParams(tc=330.0, m=0.5, omega=9.0)
    linear = LinearParams(A=8.0, B=-0.5, C1=0.01, C2=0.01)
    noise = NoiseModel(kind="ou", phi=0.5, sigma=0.002)  # mean-reverting residuals

    series = synthesize(truth, linear, Window(t1=0, t2=299), noise, seed=42)
    return series, truth


def main():
    """Main example function"""
    print("lppls-scanner - Example Usage")
    print("=" * 50)

    series, truth = create_sample_data()

    print("Sample Data Created:")
    print(f"  - {series.size} trading days, {series.dates[0]} .. {series.dates[-1]}")
    print(f"  - true critical time: ordinal {truth.tc:.0f}")

    config = CmaesConfig(seed=7)

    # Single window
    outcome = fit_window(series, Window(t1=0, t2=299), config)
    print(f"\nSingle fit: {outcome.best}")

    # Expanding windows: t1 fixed, t2 steps forward three trading days at a time
    spec = ScanSpec(
        mode=ScanMode.EXPANDING,
        fixed_end=series.dates[0],
        moving_start=series.dates[255],
        moving_end=series.dates[-1],
        step=3,
    )
    scan = run_scan(series, spec, config, jobs=4)
    print(f"\nScan: {scan.n_qualified} of {len(scan.records)} windows qualified")

    forecast = forecast_tc(scan, series, bootstrap_reps=1000, seed=7)
    gaps = gap_series(scan)
    harmonics = harmonic_check(scan, series)

    print("\n" + "=" * 60)
    print("CRITICAL TIME FORECAST")
    print("=" * 60)
    print(f"  20%-80%: {forecast.q20.date} .. {forecast.q80.date}")
    print(f"   5%-95%: {forecast.q05.date} .. {forecast.q95.date}")
    print(f"  Gap trend (Spearman): {gaps.spearman:+.2f}, change rate {gaps.change_rate:+.2f} days/day")
    print(f"  Lomb ratios in harmonic band: {harmonics.fraction_in_band:.0%}")

    print("\n" + "=" * 60)
    print("Example completed successfully!")
    print("=" * 60)


if __name__ == "__main__":
    main()
