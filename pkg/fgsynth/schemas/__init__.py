"""Validation schemas for configuration."""

from .config_schemas import TrainConfigSchema

__all__ = ['TrainConfigSchema']
