"""Mapping of exceptions to process exit codes."""

import logging
from typing import Callable

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_IO = 4


def exit_code_for(error: BaseException) -> int:
    """Exit code for ``error``: the exception's own code, 4 for I/O failures, 1 otherwise."""
    from core.exceptions import FgSynthException

    if isinstance(error, FgSynthException):
        return error.exit_code
    if isinstance(error, OSError):
        return EXIT_IO
    return EXIT_INTERNAL


def run_with_error_handling(handler: Callable, args) -> int:
    """Run a subcommand handler and turn any failure into a logged exit code.

    Args:
        handler: Subcommand function taking the parsed arguments
        args: argparse namespace
    """
    from core.exceptions import FgSynthException

    try:
        handler(args)
        return EXIT_OK
    except FgSynthException as e:
        code = exit_code_for(e)
        message = f"[{e.error_code}] {e.message}"
        if e.details:
            message += f" {e.details}"
        # Usage problems are the caller's; anything else is a failure of the run
        if code == 2:
            logger.warning(f"Client error: {message}")
        else:
            logger.error(message)
        return code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    except Exception as e:
        logger.error(f"Unhandled exception: {e}", exc_info=True)
        return EXIT_INTERNAL
