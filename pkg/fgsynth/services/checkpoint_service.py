"""Loading trained generators from checkpoints."""

import logging
from typing import Tuple

import torch

from core.models.train_config import TrainConfig
from generators.layered_generator import LayeredGenerator
from storage.checkpoint_store import load_checkpoint

logger = logging.getLogger(__name__)


def load_generator(path, device: torch.device, use_ema: bool = True) -> Tuple[LayeredGenerator, TrainConfig]:
    """Rebuild the (EMA) generator stored in a checkpoint, in eval mode without gradients.

    Raises:
        ResourceNotFoundError: If the checkpoint does not exist
        CheckpointError: If the container is unreadable
    """
    payload = load_checkpoint(path)
    config = TrainConfig.from_dict(payload['config'])
    generator = LayeredGenerator(config.generator_config())
    generator.load_state_dict(payload['generator_ema' if use_ema else 'generator'])
    generator = generator.to(device).eval().requires_grad_(False)
    logger.info(f"Loaded {'EMA ' if use_ema else ''}generator from {path} (iteration {payload['iteration']})")
    return generator, config
