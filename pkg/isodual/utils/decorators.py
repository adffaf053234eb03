"""
Custom decorators for the command line
"""

import functools
import logging
import sys
import time

import click

from .validators import IsodualError, ValidationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def handle_errors(f):
    """Map failures to exit codes: 2 for bad input, 1 for domain and unexpected errors"""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ValidationError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_USAGE)
        except IsodualError as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"error: {type(e).__name__}: {e}", err=True)
            sys.exit(EXIT_DOMAIN)
        except (click.exceptions.Exit, click.ClickException, SystemExit):
            raise
        except Exception as e:
            logger.exception(f"Unexpected error in {f.__name__}: {e}")
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_DOMAIN)

    return wrapper


def log_timing(f):
    """Log how long a verb took at debug level"""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        try:
            return f(*args, **kwargs)
        finally:
            logger.debug(f"{f.__name__} finished in {time.perf_counter() - start:.3f}s")

    return wrapper
