"""
Configuration settings for lppls-scanner
"""
from typing import Literal, Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="LPPLS_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # App settings
    app_name: str = "lppls-scanner"
    debug: bool = False
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Input
    date_column: str = "date"
    price_column: str = "close"

    # Model
    min_window_length: int = 30  # trading days
    condition_threshold: float = 1e12

    # Qualification filters
    m_min: float = 0.1
    m_max: float = 0.9
    omega_min: float = 6.0
    omega_max: float = 13.0
    tc_horizon_fraction: float = 1.0 / 3.0  # of (t2 - t1)
    damping_min: float = 1.0
    oscillations_min: float = 2.5
    b_sign_rule: Literal["negative", "below-one"] = "negative"

    # CMA-ES
    population_size: int = 7
    sigma0: float = 0.3
    max_iterations: int = 500
    tol_fun: float = 1e-12
    restarts: int = 3

    # Scans and forecasts
    step: int = 3  # trading days
    bootstrap_reps: int = 1000

    # Diagnostics
    lomb_omega_min: float = 1.0
    lomb_omega_max: float = 25.0
    lomb_points: int = 512
    harmonic_ratio_low: float = 1.6
    harmonic_ratio_high: float = 2.4
    # Not applied yet: no definition of the residual change-rate filter exists.
    residual_change_rate_max: Optional[float] = None

    # Output
    out_dir: str = "output"
    jobs: Optional[int] = None


# Create settings instance
settings = Settings()
