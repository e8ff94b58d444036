"""Command-line surface: subcommands, exit codes and step logging."""

from .error_handlers import exit_code_for, run_with_error_handling
from .step_logging import StepLogger, register_step_logging

__all__ = ['exit_code_for', 'run_with_error_handling', 'StepLogger', 'register_step_logging']
