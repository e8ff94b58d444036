"""Image embedders: differentiable maps from images to feature vectors.

Any callable ``images [B, 3, H, W] -> [B, D]`` works wherever an embedder is
expected; these two need no pretrained weights.
"""

from typing import Protocol, Sequence

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn


class Embedder(Protocol):
    def __call__(self, images: torch.Tensor) -> torch.Tensor:
        ...


class RandomProjectionEmbedder(nn.Module):
    """Fixed seeded linear projection of a downsampled image."""

    def __init__(self, dim: int = 64, side: int = 16, seed: int = 0):
        super().__init__()
        self.side = side
        generator = torch.Generator().manual_seed(seed)
        in_features = 3 * side * side
        weight = torch.randn(dim, in_features, generator=generator) / np.sqrt(in_features)
        self.register_buffer('weight', weight)

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        if images.shape[-1] != self.side:
            images = F.adaptive_avg_pool2d(images, self.side)
        return images.flatten(1) @ self.weight.to(images.dtype).T


class PyramidEmbedder(nn.Module):
    """Concatenated average-pooled copies of the image at several scales.

    Squared distance between two embeddings is a weighted sum of per-scale
    pixel L2 losses.
    """

    def __init__(self, scales: Sequence[int] = (1, 2, 4, 8)):
        super().__init__()
        self.scales = tuple(scales)

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        levels = []
        for scale in self.scales:
            level = images if scale == 1 else F.avg_pool2d(images, scale)
            levels.append(level.flatten(1) / np.sqrt(level[0].numel()))
        return torch.cat(levels, dim=1)


@torch.no_grad()
def embed_batches(embedder: Embedder, batches) -> np.ndarray:
    """Run ``embedder`` over an iterable of image batches and stack the results."""
    out = [embedder(images).detach().cpu().double().numpy() for images in batches]
    return np.concatenate(out, axis=0)
