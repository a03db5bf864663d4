"""Exception hierarchy. Each class maps to one CLI exit code."""

from __future__ import annotations


class DGMMError(Exception):
    exit_code = 1


class ParseError(DGMMError):
    """Malformed input document (bad JSON/CSV, wrong shape)."""

    exit_code = 2


class ValidationError(DGMMError):
    """Input parsed but breaks a model or response-set rule.

    ``violations`` holds every problem found, not just the first.
    """

    exit_code = 3

    def __init__(self, message: str, violations: list[str] | None = None):
        self.violations = list(violations or [])
        if self.violations:
            message = f"{message}: " + "; ".join(self.violations[:20])
            if len(self.violations) > 20:
                message += f"; ... ({len(self.violations) - 20} more)"
        super().__init__(message)


class ComputationError(DGMMError):
    """A statistic or score is undefined for the given data."""

    exit_code = 4


class DegenerateDataError(ComputationError):
    pass
