"""Style-based synthesis network without output skips.

Only the final resolution has a ToRGB layer; its output goes through tanh
so images lie in [-1, 1]. The last feature map before ToRGB is returned
alongside the image for the mask heads.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import torch
from torch import nn

from core.exceptions import GeneratorStateError
from generators.layers import MappingNetwork, NOISE_MODES, StyleBlock, ToRGB, UpSample
from utils.validation import require

logger = logging.getLogger(__name__)

STYLE_BANDS = ('coarse', 'middle', 'fine')


class SynthesisBlock(nn.Module):
    """Two style blocks at one resolution (after the 2x up-sampling)."""

    def __init__(self, w_dim: int, in_features: int, out_features: int, resolution: int):
        super().__init__()
        self.resolution = resolution
        self.conv0 = StyleBlock(w_dim, in_features, out_features, resolution)
        self.conv1 = StyleBlock(w_dim, out_features, out_features, resolution)


class StyleGenerator(nn.Module):
    """Mapping network plus synthesis network for one image branch.

    Args:
        resolution: Output side, a power of two >= 8
        z_dim: Latent width (the style width equals it)
        channels: Feature width per resolution, keys 4..resolution
        mapping_depth: Number of linear layers in the mapping network
    """

    def __init__(self, resolution: int, z_dim: int, channels: Dict[int, int], mapping_depth: int = 2):
        super().__init__()
        require(resolution >= 8 and resolution & (resolution - 1) == 0,
                f"resolution {resolution} must be a power of two >= 8", resolution=resolution)
        self.resolution = resolution
        self.z_dim = z_dim
        self.w_dim = z_dim
        self.channels = dict(channels)

        self.mapping = MappingNetwork(z_dim, self.w_dim, mapping_depth)
        self.initial_constant = nn.Parameter(torch.randn(1, channels[4], 4, 4))
        self.initial_block = StyleBlock(self.w_dim, channels[4], channels[4], 4)
        blocks = []
        res = 8
        while res <= resolution:
            blocks.append(SynthesisBlock(self.w_dim, channels[res // 2], channels[res], res))
            res *= 2
        self.blocks = nn.ModuleList(blocks)
        self.up_sample = UpSample()
        self.to_rgb = ToRGB(self.w_dim, channels[resolution])
        self.num_ws = 2 + 2 * len(self.blocks)

        self.register_buffer('w_avg', torch.zeros(self.w_dim))
        self.register_buffer('w_avg_ready', torch.tensor(False))

    @property
    def feature_channels(self) -> int:
        return self.channels[self.resolution]

    def layer_resolutions(self) -> List[int]:
        """Resolution served by each style input, in order."""
        resolutions = [4]
        for block in self.blocks:
            resolutions += [block.resolution, block.resolution]
        return resolutions + [self.resolution]

    def map(self, z: torch.Tensor, psi: float = 1.0) -> torch.Tensor:
        """Map ``z`` to per-layer styles [B, num_ws, w_dim], truncated toward the mean when psi < 1."""
        require(0.0 < psi <= 1.0, f"psi={psi} outside (0, 1]", psi=psi)
        require(z.dim() == 2 and z.shape[1] == self.z_dim,
                f"latent shape {tuple(z.shape)} does not match z_dim {self.z_dim}", shape=list(z.shape))
        w = self.mapping(z)
        if psi != 1.0:
            if not bool(self.w_avg_ready):
                raise GeneratorStateError(
                    'Truncation needs the mean style; call update_mean_style first',
                    details={'psi': psi},
                )
            w_avg = self.w_avg.to(w.dtype)
            w = w_avg + psi * (w - w_avg)
        return w.unsqueeze(1).repeat(1, self.num_ws, 1)

    @torch.no_grad()
    def update_mean_style(self, n_samples: int = 10000, rng: Optional[torch.Generator] = None,
                          batch_size: int = 1000) -> torch.Tensor:
        """Estimate the truncation center as the mean of ``n_samples`` mapped latents."""
        device = self.w_avg.device
        total = torch.zeros(self.w_dim, dtype=torch.float64, device=device)
        done = 0
        while done < n_samples:
            chunk = min(batch_size, n_samples - done)
            z = torch.randn(chunk, self.z_dim, generator=rng).to(device=device, dtype=self.w_avg.dtype)
            total += self.mapping(z).double().sum(dim=0)
            done += chunk
        self.w_avg.copy_((total / n_samples).to(self.w_avg.dtype))
        self.w_avg_ready.fill_(True)
        logger.debug(f"Mean style estimated from {n_samples} latents")
        return self.w_avg

    def synthesize(self, ws: torch.Tensor, noise_mode: str = 'random') -> Tuple[torch.Tensor, torch.Tensor]:
        """Return ``(image, features)`` for styles [B, num_ws, w_dim]."""
        require(ws.dim() == 3 and ws.shape[1:] == (self.num_ws, self.w_dim),
                f"styles shape {tuple(ws.shape)} does not match [B, {self.num_ws}, {self.w_dim}]",
                shape=list(ws.shape))
        require(noise_mode in NOISE_MODES, f"unknown noise_mode '{noise_mode}'", noise_mode=noise_mode)
        x = self.initial_constant.expand(ws.shape[0], -1, -1, -1).to(ws.dtype)
        x = self.initial_block(x, ws[:, 0], noise_mode)
        i = 1
        for block in self.blocks:
            x = self.up_sample(x)
            x = block.conv0(x, ws[:, i], noise_mode)
            x = block.conv1(x, ws[:, i + 1], noise_mode)
            i += 2
        return self.to_rgb(x, ws[:, i]), x

    def forward(self, z: torch.Tensor, psi: float = 1.0, noise_mode: str = 'random'):
        return self.synthesize(self.map(z, psi), noise_mode)

    def band_layers(self, bands: Sequence[str]) -> List[int]:
        """Style indices whose resolution falls into any of ``bands``."""
        for band in bands:
            require(band in STYLE_BANDS, f"unknown style band '{band}'", band=band)
        members = style_bands(self.resolution)
        wanted = set().union(*(members[b] for b in bands)) if bands else set()
        return [i for i, res in enumerate(self.layer_resolutions()) if res in wanted]


def style_bands(resolution: int) -> Dict[str, set]:
    """Resolutions in each mixing band.

    From 64 up: coarse 4-8, middle 16-32, fine 64 and above. Smaller
    generators keep the last level as fine, the one before as middle and
    the rest as coarse.
    """
    levels = []
    res = 4
    while res <= resolution:
        levels.append(res)
        res *= 2
    if resolution >= 64:
        return {
            'coarse': {r for r in levels if r <= 8},
            'middle': {r for r in levels if 16 <= r <= 32},
            'fine': {r for r in levels if r >= 64},
        }
    return {'coarse': set(levels[:-2]), 'middle': {levels[-2]}, 'fine': {levels[-1]}}


def mix_styles(ws_a: torch.Tensor, ws_b: torch.Tensor, layers: Sequence[int]) -> torch.Tensor:
    """Copy of ``ws_a`` with the listed style indices taken from ``ws_b``."""
    require(ws_a.shape == ws_b.shape, f"style shapes differ: {tuple(ws_a.shape)} vs {tuple(ws_b.shape)}")
    mixed = ws_a.clone()
    if layers:
        index = torch.as_tensor(list(layers), device=ws_a.device)
        mixed[:, index] = ws_b[:, index]
    return mixed
