"""Exception types shared across the package."""
from __future__ import annotations


class NumericalError(ArithmeticError):
    """A numerical routine failed to reach its accuracy target.

    Carries the best available estimate so callers can inspect how far
    the computation got before giving up.
    """

    def __init__(self, message: str, estimate: float | None = None,
                 error_estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class ConfigError(ValueError):
    """A run configuration is malformed or inconsistent.

    ``key`` names the offending field and ``line`` its position in the
    config file, when known.
    """

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if key is not None:
            parts.append(f"key '{key}'")
        if parts:
            message = f"{message} [{', '.join(parts)}]"
        super().__init__(message)
        self.key = key
        self.line = line
