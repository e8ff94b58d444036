"""Core tensor math, domain models and exceptions for fgsynth."""

from .exceptions import (
    FgSynthException,
    ContractViolationError,
    ConfigError,
    GeneratorStateError,
    NumericalError,
    TrainingAbortedError,
    ResourceNotFoundError,
    DatasetError,
    CheckpointError,
)

__all__ = [
    'FgSynthException',
    'ContractViolationError',
    'ConfigError',
    'GeneratorStateError',
    'NumericalError',
    'TrainingAbortedError',
    'ResourceNotFoundError',
    'DatasetError',
    'CheckpointError',
]
