"""Mutable state of a training run."""

from dataclasses import dataclass
from typing import Any, Dict

import torch
from torch import nn


@dataclass
class TrainState:
    """Networks, optimizers, RNG and the schedule values for ``iteration``.

    ``iteration`` is the index of the next step to run; ``gamma`` and
    ``c_bin`` are the schedule values that step will use; ``samples_seen``
    is the position in the shuffled real-image stream.
    """

    iteration: int
    gamma: float
    c_bin: float
    generator: nn.Module
    discriminator: nn.Module
    generator_ema: nn.Module
    g_optimizer: torch.optim.Optimizer
    d_optimizer: torch.optim.Optimizer
    rng: torch.Generator
    samples_seen: int = 0

    def schedule_dict(self) -> Dict[str, Any]:
        return {'iteration': self.iteration, 'gamma': self.gamma, 'c_bin': self.c_bin}
