"""
Price-data ingestion and artifact output for lppls-scanner
"""

from .timeseries import load_csv, ordinal_to_date, resolve_ordinal, slice_series, window_data
from .artifacts import read_json, write_csv, write_json

__all__ = [
    "load_csv",
    "ordinal_to_date",
    "resolve_ordinal",
    "slice_series",
    "window_data",
    "read_json",
    "write_csv",
    "write_json",
]
