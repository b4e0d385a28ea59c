"""Exception types. Each carries enough context for a machine-readable report."""

from __future__ import annotations

from typing import Optional


class WowbenchError(Exception):
    pass


class RegistryError(WowbenchError, ValueError):
    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class DegenerateCorrelationError(WowbenchError, ValueError):
    """Correlation is undefined (constant input)."""


class CalibrationError(WowbenchError, ValueError):
    pass


class PlanGraphError(WowbenchError, ValueError):
    def __init__(self, message: str, cycle: Optional[list] = None):
        super().__init__(message)
        self.cycle = cycle


class InputFileError(WowbenchError):
    """A referenced input file failed to parse or validate."""

    def __init__(self, message: str, file: Optional[str] = None, key: Optional[str] = None):
        super().__init__(message)
        self.file = file
        self.key = key

    def report(self) -> dict:
        return {"error": str(self), "file": self.file, "key": self.key}
