"""
Command-line front end for lppls-scanner

Exit codes: 0 success, 1 usage or I/O error, 2 negative analysis result
(unqualified fit, too few qualified fits for a forecast).
"""
import argparse
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from pydantic import ValidationError

from . import __version__
from .config.run_config import RunConfig
from .config.settings import settings
from .core.cmaes import CmaesConfig
from .core.diagnostics import harmonic_check, lomb_for_fit, unit_root_report
from .core.lppls import convert_to_original_form, evaluate, synthesize
from .core.optimizer import fit_window, grid_slice
from .core.windows import WindowScanner, forecast_tc, gap_series, m_series
from .data.artifacts import read_json, write_csv, write_json
from .data.timeseries import load_csv, slice_series, window_data
from .errors import InsufficientFitsError, LpplsError
from .models.diagnostics import LombGrid
from .models.lppls import LinearParams, NoiseModel, NonlinearParams
from .models.price_series import Window
from .models.scan import ScanMode, ScanSpec, WindowScan

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2

FALSE_ALARM_THRESHOLD = 1e-5


class UsageError(Exception):
    """Bad flags or config; exit 1"""


class CliParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = settings.log_file,
                      debug: bool = settings.debug):
    """LPPLS_DEBUG forces DEBUG over LPPLS_LOG_LEVEL"""
    level = "DEBUG" if debug else (level or settings.log_level)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


class LpplsApp:
    """Runs one CLI command from a resolved RunConfig"""

    def __init__(self, config: RunConfig, jobs: Optional[int] = None):
        self.config = config
        self.jobs = jobs or os.cpu_count() or 1
        self.out_dir = Path(config.out_dir)
        self.logger = logging.getLogger(__name__)

    @property
    def provenance(self) -> Dict[str, Any]:
        return self.config.model_dump(mode="json")

    @property
    def cmaes_config(self) -> CmaesConfig:
        c = self.config
        return CmaesConfig(
            population_size=c.population_size,
            sigma0=c.sigma0,
            max_iterations=c.max_iterations,
            tol_fun=c.tol_fun,
            restarts=c.restarts,
            seed=c.seed,
        )

    def _load_series(self, path: Optional[str] = None):
        path = path or self.config.input
        if not path:
            raise UsageError("--input is required")
        if not Path(path).is_file():
            raise UsageError(f"input file not found: {path}")
        return load_csv(path, self.config.date_column, self.config.price_column, self.config.label)

    def _fit_outcome(self, series):
        c = self.config
        window, _ = slice_series(series, c.t1 if c.t1 is not None else 0,
                                 c.t2 if c.t2 is not None else series.last_ordinal)
        return fit_window(series, window, self.cmaes_config, c.filter_conditions(),
                          min_length=c.min_window_length, condition_threshold=c.condition_threshold)

    def fit(self) -> int:
        series = self._load_series()
        outcome = self._fit_outcome(series)
        fit = outcome.best
        tau, y = window_data(series, fit.window)
        model = evaluate(fit.nonlinear, fit.linear, tau)
        dt = fit.nonlinear.tc - tau
        detrended = (y - fit.linear.A - fit.linear.B * dt ** fit.nonlinear.m) / dt ** fit.nonlinear.m
        amplitude, phi = convert_to_original_form(fit.linear)

        write_json(self.out_dir / "fit.json", {
            "outcome": outcome,
            "original_form": {"C": amplitude, "phi": phi},
            "tc": {"ordinal": fit.nonlinear.tc, "date": fit.tc_date},
            "window_dates": [series.dates[fit.window.t1], series.dates[fit.window.t2]],
        }, self.provenance)
        write_csv(self.out_dir / "residuals.csv", pd.DataFrame({
            "date": [d.isoformat() for d in series.dates[fit.window.t1:fit.window.t2 + 1]],
            "ordinal": tau.astype(int),
            "log_price": y,
            "model": model,
            "residual": y - model,
            "detrended": detrended,
        }), self.provenance)

        failed = fit.filter.failed if fit.filter else ["filters not evaluated"]
        verdict = "qualified" if fit.qualified else f"not qualified ({', '.join(failed)})"
        print(f"tc = {fit.tc_date} (ordinal {fit.nonlinear.tc:.2f}); fit {verdict}")
        return EXIT_OK if fit.qualified else EXIT_NEGATIVE

    def scan(self) -> int:
        c = self.config
        missing = [name for name in ("mode", "fixed", "range_start", "range_end") if getattr(c, name) is None]
        if missing:
            raise UsageError(f"scan needs {', '.join('--' + m.replace('_', '-') for m in missing)}")
        series = self._load_series()
        spec = ScanSpec(mode=c.mode, fixed_end=c.fixed, moving_start=c.range_start,
                        moving_end=c.range_end, step=c.step)
        scanner = WindowScanner(self.cmaes_config, c.filter_conditions(), self.jobs, c.min_window_length,
                                c.condition_threshold)
        scan = scanner.run_scan(series, spec)

        write_json(self.out_dir / "scan.json", {"scan": scan, "summary": scan.summary()}, self.provenance)
        write_csv(self.out_dir / "scan.csv", self._scan_frame(scan), self.provenance)
        print(f"{scan.n_qualified} of {len(scan.records)} windows qualified")

        try:
            forecast = forecast_tc(scan, series, c.bootstrap_reps, c.seed)
        except InsufficientFitsError as e:
            print(f"No forecast: {e}", file=sys.stderr)
            return EXIT_NEGATIVE

        indicators: Dict[str, Any] = {}
        if spec.mode == ScanMode.EXPANDING:
            try:
                gaps = gap_series(scan)
                ms = {p.t2: p.m for p in m_series(scan)}
                indicators = {"gap_spearman": gaps.spearman, "gap_change_rate": gaps.change_rate}
                write_csv(self.out_dir / "gap.csv", pd.DataFrame({
                    "t2": [p.t2 for p in gaps.points],
                    "t2_date": [p.t2_date.isoformat() for p in gaps.points],
                    "gap": [p.gap for p in gaps.points],
                    "m": [ms[p.t2] for p in gaps.points],
                }), self.provenance)
            except InsufficientFitsError as e:
                self.logger.warning(f"Gap indicator skipped: {e}")

        write_json(self.out_dir / "forecast.json", {"forecast": forecast, "indicators": indicators},
                   self.provenance)
        flag = " (low confidence)" if forecast.low_confidence else ""
        print(f"tc 20%/80%: {forecast.q20.date} .. {forecast.q80.date}; "
              f"5%/95%: {forecast.q05.date} .. {forecast.q95.date}{flag}")
        return EXIT_OK

    @staticmethod
    def _scan_frame(scan: WindowScan) -> pd.DataFrame:
        rows = []
        for record in scan.records:
            fit = record.outcome.best if record.outcome else None
            rows.append({
                "t1": record.window.t1,
                "t2": record.window.t2,
                "t1_date": record.t1_date.isoformat(),
                "t2_date": record.t2_date.isoformat(),
                "tc": fit.nonlinear.tc if fit else np.nan,
                "tc_date": fit.tc_date.isoformat() if fit else "",
                "m": fit.nonlinear.m if fit else np.nan,
                "omega": fit.nonlinear.omega if fit else np.nan,
                "sse": fit.sse if fit else np.nan,
                "qualified": record.qualified,
                "gap": fit.gap if fit else np.nan,
                "reason": "" if record.qualified else record.reason,
            })
        return pd.DataFrame(rows)

    def diagnose(self) -> int:
        c = self.config
        scan_path = Path(c.scan) if c.scan else self.out_dir / "scan.json"
        if not scan_path.is_file():
            raise UsageError(f"scan artifact not found: {scan_path}")
        document = read_json(scan_path)
        scan = WindowScan.model_validate(document["scan"])
        source = document.get("config", {})
        series = self._load_series(c.input or source.get("input"))
        if not scan.qualified:
            print("Scan has no qualified fits", file=sys.stderr)
            return EXIT_NEGATIVE

        if c.check in ("lomb", "all"):
            grid = LombGrid(omega_min=c.lomb_omega_min, omega_max=c.lomb_omega_max, points=c.lomb_points)
            frames = []
            for fit in scan.qualified:
                try:
                    result = lomb_for_fit(fit, series, grid)
                except LpplsError as e:
                    self.logger.warning(f"No periodogram for window {fit.window}: {e}")
                    continue
                frames.append(pd.DataFrame({
                    "t1": fit.window.t1,
                    "t2": fit.window.t2,
                    "frequency": result.frequencies,
                    "power": result.power,
                }))
            if frames:
                write_csv(self.out_dir / "lomb.csv", pd.concat(frames, ignore_index=True), self.provenance)
            report = harmonic_check(scan, series, grid, c.harmonic_ratio_low, c.harmonic_ratio_high)
            worst = max((e.false_alarm for e in report.entries), default=1.0)
            write_json(self.out_dir / "lomb_summary.json", {
                "harmonics": report,
                "max_false_alarm": worst,
                "all_significant": worst < FALSE_ALARM_THRESHOLD,
            }, self.provenance)
            print(f"Lomb: max false alarm {worst:.3g}; "
                  f"{report.fraction_in_band:.0%} of ratios in [{c.harmonic_ratio_low}, {c.harmonic_ratio_high}]")

        if c.check in ("unitroot", "all"):
            report = unit_root_report(scan, series, c.adf_lags, c.pp_bandwidth)
            first = min(r.t1_date for r in scan.records if r.qualified)
            last = max(r.t2_date for r in scan.records if r.qualified)
            write_csv(self.out_dir / "unitroot.csv", pd.DataFrame([{
                "index": series.label,
                "window_range": f"{first.isoformat()}-{last.isoformat()}",
                "N": len(report.windows),
                "level": row.level,
                "pp_percent": row.pp_percent,
                "adf_percent": row.adf_percent,
            } for row in report.summary]), self.provenance)
            write_json(self.out_dir / "unitroot.json", report, self.provenance)
            for row in report.summary:
                print(f"Unit root at {row.level}: PP {row.pp_percent:.0f}%, ADF {row.adf_percent:.0f}%")
        return EXIT_OK

    def synth(self) -> int:
        c = self.config
        missing = [name for name in ("tc", "m", "omega", "length") if getattr(c, name) is None]
        if missing:
            raise UsageError(f"synth needs {', '.join('--' + m for m in missing)}")
        window = Window(t1=0, t2=c.length - 1)
        if c.tc <= window.t2:
            raise UsageError(f"--tc {c.tc} lies inside the window [0, {window.t2}]")
        try:
            noise = NoiseModel(kind=c.noise, sigma=c.sigma, phi=c.phi)
        except ValidationError as e:
            raise UsageError(f"invalid noise parameters: {e}") from e

        series = synthesize(
            NonlinearParams(tc=c.tc, m=c.m, omega=c.omega),
            LinearParams(A=c.A, B=c.B, C1=c.C1, C2=c.C2),
            window, noise, c.seed, start_date=c.start_date,
        )
        path = Path(c.output) if c.output else self.out_dir / "synth.csv"
        write_csv(path, pd.DataFrame({
            c.date_column: [d.isoformat() for d in series.dates],
            c.price_column: series.prices,
        }), self.provenance)
        print(f"Wrote {series.size} synthetic closes to {path}")
        return EXIT_OK

    def landscape(self) -> int:
        c = self.config
        series = self._load_series()
        outcome = self._fit_outcome(series)
        fit = outcome.best
        write_json(self.out_dir / "landscape_fit.json", {"outcome": outcome}, self.provenance)
        for pair in c.pairs:
            grid = grid_slice(series, fit.window, pair, c.resolution, fit, c.filter_conditions(),
                              c.condition_threshold)
            write_csv(self.out_dir / f"landscape_{pair.value}.csv", grid.to_frame(), self.provenance)
            x, y, value = grid.argmin()
            print(f"{pair.value}: grid minimum {value:.6g} at ({x:.4g}, {y:.4g}); fit sse {fit.sse:.6g}")
        return EXIT_OK

    def run(self) -> int:
        return getattr(self, self.config.command)()


def _add_shared(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("shared")
    group.add_argument("--input", "-i", help="CSV of daily closes")
    group.add_argument("--seed", type=int, help="random seed (required)")
    group.add_argument("--out-dir", dest="out_dir", help=f"artifact directory (default: {settings.out_dir})")
    group.add_argument("--jobs", "-j", type=int, help="worker processes (default: number of processors)")
    group.add_argument("--config", help="flat key=value file; flags override it")
    group.add_argument("--date-column", dest="date_column")
    group.add_argument("--price-column", dest="price_column")
    group.add_argument("--label", help="series name used in reports")

    cma = parser.add_argument_group("optimizer")
    cma.add_argument("--population-size", dest="population_size", type=int)
    cma.add_argument("--sigma0", type=float)
    cma.add_argument("--max-iterations", dest="max_iterations", type=int)
    cma.add_argument("--tol-fun", dest="tol_fun", type=float)
    cma.add_argument("--restarts", type=int)
    cma.add_argument("--min-window-length", dest="min_window_length", type=int)
    cma.add_argument("--condition-threshold", dest="condition_threshold", type=float,
                     help="largest design-matrix condition estimate before a point is degenerate")
    cma.add_argument("--b-sign-rule", dest="b_sign_rule", choices=["negative", "below-one"])


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="lppls", description="LPPLS bubble detection and critical-time forecasting")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", parser_class=CliParser)
    commands.required = True

    fit = commands.add_parser("fit", help="calibrate one window")
    _add_shared(fit)
    fit.add_argument("--t1", help="window start (YYYY-MM-DD or ordinal)")
    fit.add_argument("--t2", help="window end (YYYY-MM-DD or ordinal)")

    scan = commands.add_parser("scan", help="fit an expanding or shrinking window ensemble")
    _add_shared(scan)
    scan.add_argument("--mode", choices=["expanding", "shrinking"])
    scan.add_argument("--fixed", help="fixed endpoint: t1 when expanding, t2 when shrinking")
    scan.add_argument("--range-start", dest="range_start", help="first value of the moving endpoint")
    scan.add_argument("--range-end", dest="range_end", help="last value of the moving endpoint")
    scan.add_argument("--step", type=int, help=f"trading days between windows (default: {settings.step})")
    scan.add_argument("--bootstrap-reps", dest="bootstrap_reps", type=int)

    diagnose = commands.add_parser("diagnose", help="Lomb and unit-root checks on a scan artifact")
    _add_shared(diagnose)
    diagnose.add_argument("--check", choices=["lomb", "unitroot", "all"])
    diagnose.add_argument("--scan", help="scan.json from a previous scan (default: <out-dir>/scan.json)")
    diagnose.add_argument("--adf-lags", dest="adf_lags", type=int)
    diagnose.add_argument("--pp-bandwidth", dest="pp_bandwidth", type=int)

    synth = commands.add_parser("synth", help="write a synthetic LPPLS price file")
    _add_shared(synth)
    for name in ("tc", "m", "omega", "A", "B", "C1", "C2", "sigma", "phi"):
        synth.add_argument(f"--{name}", type=float)
    synth.add_argument("--length", type=int, help="number of trading days")
    synth.add_argument("--start-date", dest="start_date")
    synth.add_argument("--noise", choices=["none", "gaussian", "ou"])
    synth.add_argument("--output", "-o", help="CSV path (default: <out-dir>/synth.csv)")

    landscape = commands.add_parser("landscape", help="cost cross-sections around a fit")
    _add_shared(landscape)
    landscape.add_argument("--t1")
    landscape.add_argument("--t2")
    landscape.add_argument("--pair", dest="pairs", action="append",
                           choices=["tc-m", "tc-omega", "m-omega"], help="repeatable; default all three")
    landscape.add_argument("--resolution", type=int, help="grid points per axis (minimum 8)")
    return parser


def _read_config_file(path: str) -> Dict[str, Any]:
    if not Path(path).is_file():
        raise UsageError(f"config file not found: {path}")
    values = {key.strip().replace("-", "_"): value for key, value in dotenv_values(path).items()}
    unknown = sorted(set(values) - set(RunConfig.model_fields) - {"jobs"})
    if unknown:
        raise UsageError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return {key: value for key, value in values.items() if value is not None}


def resolve_config(args: argparse.Namespace):
    """Flags over config file over settings defaults; returns (RunConfig, jobs)"""
    values: Dict[str, Any] = {}
    if args.config:
        values.update(_read_config_file(args.config))
    flags = {key: value for key, value in vars(args).items() if value is not None and key != "config"}
    values.update(flags)

    jobs = values.pop("jobs", None) or settings.jobs
    if "seed" not in values:
        raise UsageError("--seed is required")
    try:
        config = RunConfig(**values)
        jobs = int(jobs) if jobs is not None else None
    except (ValidationError, ValueError) as e:
        raise UsageError(str(e)) from e
    if jobs is not None and jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return config, jobs


def _write_run_meta(app: LpplsApp, started: datetime, exit_code: int):
    write_json(app.out_dir / "run_meta.json", {
        "command": app.config.command,
        "version": __version__,
        "jobs": app.jobs,
        "started_at": started.isoformat(),
        "finished_at": datetime.now(timezone.utc).isoformat(),
        "exit_code": exit_code,
    })


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    configure_logging()
    if settings.residual_change_rate_max is not None:
        logger.warning("LPPLS_RESIDUAL_CHANGE_RATE_MAX is set but no residual change-rate filter is applied")
    parser = build_parser()
    args = parser.parse_args(argv)
    logger.info(f"{settings.app_name} {__version__}: {args.command}")

    try:
        config, jobs = resolve_config(args)
        app = LpplsApp(config, jobs)
        started = datetime.now(timezone.utc)
        exit_code = app.run()
        _write_run_meta(app, started, exit_code)
        return exit_code
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except KeyboardInterrupt:
        print("\nOperation cancelled by user", file=sys.stderr)
        return EXIT_ERROR
    except (LpplsError, OSError, ValidationError) as e:
        logger.error(f"Application error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
