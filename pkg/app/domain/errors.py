from typing import Any, Optional


class PsdMixError(Exception):
    """Root of every error raised by the package."""


class DomainError(PsdMixError, ValueError):
    """An input lies outside the domain of an operation."""


class DegenerateModelError(DomainError):
    def __init__(self, message: str, row: Optional[int] = None):
        super().__init__(message)
        self.row = row


class NonConvergenceError(PsdMixError, RuntimeError):
    def __init__(self, message: str, best: Any = None):
        super().__init__(message)
        self.best = best


class ResourceLimitError(PsdMixError, RuntimeError):
    pass


class InputError(PsdMixError, ValueError):
    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.row = row
        self.column = column
