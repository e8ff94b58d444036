"""Coarse and fine mask heads reading the foreground generator's last features."""

import torch
from torch import nn

from core.imaging import combine_masks, minmax_normalize
from core.models.mask_bundle import MaskBundle
from generators.layers import EqualizedConv2d
from utils.validation import require


class MaskHead(nn.Module):
    """Two 3x3 convs with leaky ReLU, then a 1x1 projection to one channel."""

    def __init__(self, in_features: int, hidden: int):
        super().__init__()
        self.net = nn.Sequential(
            EqualizedConv2d(in_features, hidden, kernel_size=3, padding=1),
            nn.LeakyReLU(0.2),
            EqualizedConv2d(hidden, hidden, kernel_size=3, padding=1),
            nn.LeakyReLU(0.2),
            EqualizedConv2d(hidden, 1, kernel_size=1),
        )

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        return self.net(features)


class MaskGenerator(nn.Module):
    """Builds the final alpha mask from two structurally identical heads.

    Each head's raw map is min-max normalized per sample; the fine map is
    faded in by ``gamma`` and the sum clipped to [0, 1]. Without a fine head
    the fine map is zero and the mask is the coarse map.
    """

    def __init__(self, in_features: int, hidden: int = 32, use_fine: bool = True):
        super().__init__()
        self.in_features = in_features
        self.coarse_head = MaskHead(in_features, hidden)
        self.fine_head = MaskHead(in_features, hidden) if use_fine else None

    def forward(self, features: torch.Tensor, gamma: float = 1.0) -> MaskBundle:
        require(
            features is not None and features.dim() == 4 and features.shape[1] == self.in_features,
            f"mask heads expect [B, {self.in_features}, H, W] features, got "
            f"{None if features is None else tuple(features.shape)}",
        )
        coarse = minmax_normalize(self.coarse_head(features))
        if self.fine_head is not None:
            fine = minmax_normalize(self.fine_head(features))
        else:
            fine = torch.zeros_like(coarse)
        mask, contribution = combine_masks(coarse, fine, gamma)
        return MaskBundle(mask=mask, coarse=coarse, fine=fine, fine_contribution=contribution)
