"""
Error handling utilities for spinnet

This module provides the exception hierarchy shared by the library and the
command line, together with the exit-code table used by ``spinnet.cli``.
"""

from typing import Any

from .logging import get_logger

logger = get_logger(__name__)

# Process exit codes and their meanings
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

ERROR_CODE_DESCRIPTIONS = {
    EXIT_CONFIG: "Configuration error. The experiment name, parameters or inputs are invalid.",
    EXIT_NUMERIC: "Numerical failure. A unitarity, hermiticity or conservation check failed.",
}


class SpinNetError(Exception):
    """Base exception for all spinnet errors."""

    exit_code = EXIT_CONFIG


class ConfigurationError(SpinNetError):
    """Raised when a run configuration or CLI argument is invalid."""


class PreconditionError(SpinNetError, ValueError):
    """Raised when an operation is called with inputs outside its domain."""


class NumericalError(SpinNetError):
    """Raised when a numerical invariant is violated beyond its tolerance."""

    exit_code = EXIT_NUMERIC

    def __init__(
        self,
        message: str,
        check: str | None = None,
        residual: float | None = None,
        tolerance: float | None = None,
    ):
        self.check = check
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(message)


def exit_code_for(error: BaseException) -> int:
    """Map an exception onto a CLI exit code.

    Args:
        error: The exception raised by an experiment

    Returns:
        int: 2 for configuration and precondition errors, 3 for numerical failures
    """
    if isinstance(error, SpinNetError):
        return error.exit_code
    if isinstance(error, (ValueError, KeyError, TypeError)):
        return EXIT_CONFIG
    return EXIT_NUMERIC


def format_error_response(error: BaseException) -> dict[str, Any]:
    """Format an error as a standardized JSON-serializable response.

    Args:
        error: The exception to report

    Returns:
        Dict[str, Any]: Formatted error response
    """
    code = exit_code_for(error)
    response: dict[str, Any] = {
        "error": str(error),
        "exit_code": code,
        "description": ERROR_CODE_DESCRIPTIONS.get(code, "Unexpected error."),
    }

    if isinstance(error, NumericalError):
        response["details"] = {
            "check": error.check,
            "residual": error.residual,
            "tolerance": error.tolerance,
        }

    logger.error("Error: %s", error)

    return response


def require(condition: bool, message: str) -> None:
    """Raise a PreconditionError unless ``condition`` holds."""
    if not condition:
        raise PreconditionError(message)


def check_residual(check: str, residual: float, tolerance: float) -> float:
    """Raise a NumericalError when ``residual`` exceeds ``tolerance``.

    Returns:
        float: The residual, for logging by the caller
    """
    if not residual < tolerance:
        raise NumericalError(
            f"{check} check failed: residual {residual:.3e} exceeds {tolerance:.1e}",
            check=check,
            residual=float(residual),
            tolerance=tolerance,
        )
    return residual
