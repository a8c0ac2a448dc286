"""
Exception hierarchy and the central error handler used by the command line.
"""
import logging
import sys
from typing import Optional, TextIO

from pydantic import ValidationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class MixqmcError(Exception):
    """Base class for all library errors."""

    exit_code: int = EXIT_USAGE

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ParseError(MixqmcError):
    """Malformed input text; carries the 1-based line number."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DirectionNumberError(MixqmcError):
    """Direction numbers violate the oddness or size constraint."""


class CapacityError(MixqmcError):
    """More dimensions requested than the loaded table provides."""


class CapabilityError(MixqmcError):
    """Problem size outside the range an exact search supports."""


class DomainError(MixqmcError):
    """Argument outside the mathematical domain of an operation."""


class InfeasibleError(MixqmcError):
    """No allocation satisfies the constraints (budget too small, not a power of two)."""


class ContractError(MixqmcError):
    """Caller broke a documented precondition (unsorted fractions, unstratified input)."""


class EvaluationError(MixqmcError):
    """Integrand or density evaluation failed at a sampled point."""

    exit_code = EXIT_NUMERIC


class NumericalError(MixqmcError):
    """Non-finite estimates or a failed numerical routine."""

    exit_code = EXIT_NUMERIC


def format_validation_error(exc: ValidationError) -> str:
    """
    Render pydantic validation errors as one "field: message" line each.
    """
    lines = []
    for error in exc.errors():
        field_path = ".".join(str(loc) for loc in error["loc"]) or "<root>"
        lines.append(f"{field_path}: {error['msg']}")
    return "Validation error\n" + "\n".join(f"  {line}" for line in lines)


def handle_cli_error(exc: BaseException, stream: Optional[TextIO] = None) -> int:
    """
    Map an exception raised by a command to a message on stderr and an exit code.

    Args:
        exc: The exception raised while running the command
        stream: Where to write the message (default: sys.stderr)

    Returns:
        Process exit code (2 usage/infeasible, 3 numeric failure)
    """
    stream = stream or sys.stderr
    if isinstance(exc, ValidationError):
        message, code = format_validation_error(exc), EXIT_USAGE
    elif isinstance(exc, MixqmcError):
        message, code = f"{type(exc).__name__}: {exc.message}", exc.exit_code
    elif isinstance(exc, (FloatingPointError, ZeroDivisionError, OverflowError)):
        message, code = f"numerical failure: {exc}", EXIT_NUMERIC
    else:
        raise exc

    logger.error(message)
    print(f"error: {message}", file=stream)
    return code
