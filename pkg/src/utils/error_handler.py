"""
Error handling for the cantor-ei toolkit
Provides the exception hierarchy, exit-code mapping and input validation
"""

from typing import Dict, Any, Callable, Optional
from functools import wraps
import numbers
import logging

logger = logging.getLogger('cantor_ei.errors')

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_NUMERIC = 4
EXIT_OUTPUT = 5


class CantorEIException(Exception):
    """Base exception for the toolkit"""
    exit_code = EXIT_UNEXPECTED

    def __init__(self, message: str, code: str = "GENERAL_ERROR", details: Dict[str, Any] = None):
        super().__init__(message)
        self.message = message
        self.code = code
        self.details = details or {}


class ValidationException(CantorEIException):
    """Input validation exceptions"""
    exit_code = EXIT_CONFIG


class ConfigException(ValidationException):
    """Bad flags, config files or map and IFS files"""
    pass


class DomainException(ValidationException):
    """A point outside [0,1] was passed to a map or observable"""
    pass


class UnsupportedMapException(ValidationException):
    """The exact path needs affine branches"""
    pass


class ScheduleException(ValidationException):
    """Misuse of the gap schedule, e.g. a power of 3 in q_schedule"""
    pass


class NoClosedFormException(ValidationException):
    """No closed-form extremal index is known for the map"""
    pass


class ResourceLimitException(CantorEIException):
    """Depth, denominator or matrix size caps exceeded"""
    exit_code = EXIT_RESOURCE


class BudgetExceededException(ResourceLimitException):
    """Caller-supplied operation budget exhausted"""
    pass


class NumericException(CantorEIException):
    """Numerical failures"""
    exit_code = EXIT_NUMERIC


class NonConvergenceException(NumericException):
    """Power iteration did not converge"""

    def __init__(self, message: str, last_iterates, details: Dict[str, Any] = None):
        super().__init__(message, "NON_CONVERGENCE", details)
        self.last_iterates = tuple(last_iterates)


class OutputException(CantorEIException):
    """Output could not be written"""
    exit_code = EXIT_OUTPUT


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the process exit code"""
    if isinstance(error, CantorEIException):
        return error.exit_code
    if isinstance(error, OSError):
        return EXIT_OUTPUT
    return EXIT_UNEXPECTED


def handle_cli_error(error: BaseException, context: str = "CLI operation") -> int:
    """Log an error and return its exit code"""
    if isinstance(error, CantorEIException):
        logger.error(f"{context} failed [{error.code}]: {error.message}")
        if error.details:
            logger.debug(f"{context} details: {error.details}")
    elif isinstance(error, OSError):
        logger.error(f"{context} failed with I/O error: {error}")
    else:
        logger.error(f"Unexpected error in {context}: {error}", exc_info=True)
    return exit_code_for(error)


def safe_cli_operation(context: str = "CLI operation"):
    """Decorator turning toolkit exceptions into exit codes"""
    def decorator(func: Callable[..., Optional[int]]):
        @wraps(func)
        def wrapper(*args, **kwargs) -> int:
            try:
                result = func(*args, **kwargs)
                return EXIT_OK if result is None else result
            except Exception as e:
                return handle_cli_error(e, context)
        return wrapper
    return decorator


# Integer arguments shared by the service and theory entry points
VALIDATION_RULES = {
    'n': {'required': True, 'min_value': 1},
    'ell': {'required': True, 'min_value': 1},
    'seed': {'required': True, 'min_value': 0},
    'cap': {'required': True, 'min_value': 1, 'max_value': 10_000},
    'burn_in': {'min_value': 0},
    'm': {'required': True, 'min_value': 2},
    'q': {'required': True, 'min_value': 0},
}


def validate_input(field_name: str, value: Any, rules: Optional[Dict[str, Any]] = None) -> Any:
    """Check an integer argument against its rule; returns it as a plain int"""
    rule = VALIDATION_RULES.get(field_name, {}) if rules is None else rules
    if value is None:
        if rule.get('required', False):
            raise ValidationException(f"{field_name} is required", "REQUIRED_FIELD")
        return None
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationException(f"{field_name} must be an integer, got {value!r}", "INVALID_TYPE")
    lo, hi = rule.get('min_value'), rule.get('max_value')
    if lo is not None and value < lo:
        raise ValidationException(f"{field_name} must be at least {lo}, got {value}", "MIN_VALUE")
    if hi is not None and value > hi:
        raise ValidationException(f"{field_name} must not exceed {hi}, got {value}", "MAX_VALUE")
    return int(value)
