"""Data models for layered image synthesis."""

from .latent import LatentCode
from .mask_bundle import MaskBundle
from .loss_report import LossReport, LossCoefficients, LOSS_NAMES, GENERATOR_PARTS, DISCRIMINATOR_PARTS
from .train_config import GeneratorConfig, TrainConfig, unaligned_mode_adjustments, ARCHITECTURE_KEYS
from .train_state import TrainState
from .dataset_spec import DatasetSpec, OracleSample
from .reports import SegmentationReport, EmbeddingStats, EvaluationReport
from .inversion_result import InversionResult

__all__ = [
    'LatentCode',
    'MaskBundle',
    'LossReport',
    'LossCoefficients',
    'LOSS_NAMES',
    'GENERATOR_PARTS',
    'DISCRIMINATOR_PARTS',
    'GeneratorConfig',
    'TrainConfig',
    'unaligned_mode_adjustments',
    'ARCHITECTURE_KEYS',
    'TrainState',
    'DatasetSpec',
    'OracleSample',
    'SegmentationReport',
    'EmbeddingStats',
    'EvaluationReport',
    'InversionResult',
]
