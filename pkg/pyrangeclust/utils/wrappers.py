import sys
import logging
from functools import wraps
from typing import Callable

from pydantic import ValidationError

from pyrangeclust.utils.exceptions import RangeClusteringError


def cli_exec(_func: Callable) -> Callable:
    """
    Wrapper for executing commands through the console, turning errors into
    logged messages and process exit codes.

    Parameters
    ----------
    _func: Callable
        Command body to be wrapped.

    Returns
    -------
    Callable
        Command already wrapped. It exits with 0 on success, 1 on usage
        errors, 2 on data errors and 3 on internal failures.
    """
    @wraps(_func)
    def wrap(*args, **kwargs):
        try:
            _func(*args, **kwargs)
        except ValidationError as invalid:
            logging.error(f"Invalid arguments: {invalid}")
            sys.exit(1)
        except RangeClusteringError as failure:
            if failure.exit_code == 3:
                logging.exception(f"Internal check failed: {failure}")
            else:
                logging.error(f"{type(failure).__name__}: {failure}")
            sys.exit(failure.exit_code)
        except AssertionError as failure:
            logging.exception(f"Internal assertion failed: {failure}")
            sys.exit(3)
        sys.exit(0)
    return wrap
