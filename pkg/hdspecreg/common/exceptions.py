"""
Common error handling utilities for hdspecreg.
"""

import functools
import logging
from typing import Any, Callable, TypeVar, cast

import numpy as np

T = TypeVar("T")

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_NUMERICAL_ERROR = 2
EXIT_USAGE_ERROR = 2


class HdSpecRegError(Exception):
    """
    Base class for every error raised by hdspecreg.
    """

    pass


class DataError(HdSpecRegError, ValueError):
    """
    Input data violates a precondition (bad CSV cell, non-binary outcome,
    dimension mismatch, invalid parameter).
    """

    pass


class ConfigError(DataError):
    """
    Configuration file missing, unreadable, or holding invalid values.
    """

    pass


class UsageError(HdSpecRegError):
    """
    Command-line options are missing or conflict with each other.
    """

    pass


class NumericalError(HdSpecRegError, ArithmeticError):
    """
    A numerical routine could not produce a meaningful result.
    """

    pass


class DegenerateDensityError(NumericalError):
    """
    A density estimate used as a denominator is zero or non-positive.
    """

    pass


class RankDeficiencyError(NumericalError):
    """
    A design or moment matrix does not have the rank an estimator needs.
    """

    pass


class SeparationError(NumericalError):
    """
    Binary outcomes are perfectly separated by the index; the MLE diverges.
    """

    pass


class OptimizerError(NumericalError):
    """
    An optimizer exhausted its budget without a finite criterion value.
    """

    pass


def exit_code_for(exc: BaseException) -> int:
    """
    Map an exception onto the command-line exit code.

    Parameters
    ----------
    exc : BaseException
        The exception that stopped a command.

    Returns
    -------
    int
        1 for data problems, 2 for numerical failures and command-line misuse.
    """
    if isinstance(exc, UsageError):
        return EXIT_USAGE_ERROR
    if isinstance(exc, (NumericalError, np.linalg.LinAlgError, FloatingPointError)):
        return EXIT_NUMERICAL_ERROR
    return EXIT_DATA_ERROR


def handle_exceptions(
    default_return_value: Any = None, log_exception: bool = True
) -> Callable[[Callable[..., T]], Callable[..., T]]:
    """
    Decorator for standardized exception handling across the codebase.

    Used where one failure must degrade gracefully instead of aborting the
    surrounding computation: a single Monte Carlo replication, a single
    cross-validation grid cell, or a single optimizer restart.

    Parameters
    ----------
    default_return_value : Any, optional
        Value to return if an exception occurs, by default None.
    log_exception : bool, optional
        Whether to log the full exception traceback (True) or just the message
        (False), by default True.

    Returns
    -------
    Callable[[Callable[..., T]], Callable[..., T]]
        The decorated function with standardized exception handling.

    Examples
    --------
    .. code-block:: python

        @handle_exceptions(default_return_value=float("inf"), log_exception=False)
        def criterion_or_inf(h):
            return cv_criterion(sample, h, spec)
    """

    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except NumericalError as e:
                _log(log_exception, "Numerical error in %s: %s", func.__name__, e)
                return default_return_value
            except DataError as e:
                _log(log_exception, "Data error in %s: %s", func.__name__, e)
                return default_return_value
            except np.linalg.LinAlgError as e:
                _log(log_exception, "Linear algebra error in %s: %s", func.__name__, e)
                return default_return_value
            except FloatingPointError as e:
                _log(log_exception, "Floating point error in %s: %s", func.__name__, e)
                return default_return_value
            except FileNotFoundError as e:
                _log(log_exception, "File not found error in %s: %s", func.__name__, e)
                return default_return_value
            except Exception as e:
                _log(log_exception, "Unexpected error in %s: %s", func.__name__, e)
                return default_return_value

        return cast(Callable[..., T], wrapper)

    return decorator


def _log(log_exception: bool, msg: str, *args: Any) -> None:
    if log_exception:
        logger.exception(msg, *args)
    else:
        logger.warning(msg, *args)
