"""Result of optimizing a latent to reproduce an image."""

from dataclasses import dataclass, field
from typing import List, Optional

import torch


@dataclass
class InversionResult:
    z: Optional[torch.Tensor]
    w_fg: torch.Tensor
    w_bg: torch.Tensor
    reconstruction: torch.Tensor
    foreground: torch.Tensor
    mask: torch.Tensor
    loss: float
    low_confidence: bool
    loss_history: List[float] = field(default_factory=list)
