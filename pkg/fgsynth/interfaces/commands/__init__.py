"""Subcommand registration for the fgsynth CLI."""

from .composite_command import register_composite_command
from .evaluate_command import register_evaluate_command
from .generate_command import register_generate_command
from .invert_command import register_invert_command
from .oracle_command import register_oracle_command
from .train_command import register_train_command

__all__ = [
    'register_train_command',
    'register_generate_command',
    'register_composite_command',
    'register_evaluate_command',
    'register_invert_command',
    'register_oracle_command',
]
