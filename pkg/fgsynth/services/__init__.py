"""Training, evaluation and inversion services."""

from .degeneration_monitor import DegenerationAlert, DegenerationMonitor
from .training_service import FakeBatch, TrainingService, build_fake_batch, update_ema

__all__ = [
    'DegenerationAlert',
    'DegenerationMonitor',
    'FakeBatch',
    'TrainingService',
    'build_fake_batch',
    'update_ema',
]
