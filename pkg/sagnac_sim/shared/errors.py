"""Exception hierarchy and process exit codes."""

from __future__ import annotations

from typing import Any

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG_ERROR = 3
EXIT_FIT_FAILURE = 4


class SagnacSimError(Exception):
    exit_code = 1


class DomainError(SagnacSimError, ValueError):
    """An operation was called outside its precondition."""


class ConfigError(SagnacSimError):
    exit_code = EXIT_CONFIG_ERROR

    def __init__(self, problems: list[tuple[str, str]] | str) -> None:
        if isinstance(problems, str):
            problems = [("", problems)]
        self.problems = problems
        super().__init__("; ".join(f"{key}: {msg}" if key else msg for key, msg in problems))


class FitError(SagnacSimError):
    exit_code = EXIT_FIT_FAILURE

    def __init__(self, reason: str, diagnostics: dict[str, Any] | None = None) -> None:
        self.reason = reason
        self.diagnostics = diagnostics or {}
        super().__init__(reason)
