"""
Exception types raised by lppls-scanner
"""
from typing import Optional


class LpplsError(Exception):
    """Base class for all library errors"""


class SeriesValidationError(LpplsError, ValueError):
    """Input price data is malformed"""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class DomainError(LpplsError, ValueError):
    """Model evaluated at or beyond the critical time"""


class DegenerateBasisError(LpplsError):
    """The LPPLS design matrix is (near) singular"""

    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"degenerate LPPLS basis (condition estimate {condition:.3e})")


class WindowTooShortError(LpplsError, ValueError):
    """Window has fewer trading days than the fit requires"""


class FitFailedError(LpplsError):
    """Every optimizer restart ended on a degenerate basis"""


class ScanSpecError(LpplsError, ValueError):
    """Scan specification does not produce usable windows"""


class InsufficientFitsError(LpplsError):
    """Too few qualified fits for the requested statistic"""


class DegenerateInputError(LpplsError, ValueError):
    """Zero-variance or too-short input to a diagnostic"""


class NoiseModelError(LpplsError, ValueError):
    """Invalid synthesizer noise parameters"""
