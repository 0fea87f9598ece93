"""
lppls-scanner - LPPLS bubble detection and critical-time forecasting
"""

__version__ = "0.1.0"
__description__ = "Calibrates log-periodic power law singularity models to price series, scans window ensembles and forecasts the critical time."
