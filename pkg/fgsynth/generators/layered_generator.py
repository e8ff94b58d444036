"""Foreground/background generator pair with mask heads."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import torch
from torch import nn

from core.imaging import composite
from core.models.latent import LatentCode
from core.models.mask_bundle import MaskBundle
from core.models.train_config import GeneratorConfig
from generators.mask_generator import MaskGenerator
from generators.style_generator import StyleGenerator, mix_styles
from utils.validation import require

logger = logging.getLogger(__name__)


@dataclass
class LayeredSample:
    foreground: torch.Tensor
    background: torch.Tensor
    masks: MaskBundle
    composite: torch.Tensor


class LayeredGenerator(nn.Module):
    """Parameter-disjoint foreground and background style generators.

    The foreground branch uses ``fg_fraction`` of the reference widths and
    latent size, the background branch ``bg_fraction``; the background
    latent is the prefix of the foreground latent. Mask heads read the
    foreground branch's last feature map.
    """

    def __init__(self, config: GeneratorConfig):
        super().__init__()
        self.config = config
        fg_channels = config.branch_channels(config.fg_fraction)
        bg_channels = config.branch_channels(config.bg_fraction)
        require(config.bg_latent_dim < config.fg_latent_dim,
                'background latent must be shorter than the foreground latent',
                fg=config.fg_latent_dim, bg=config.bg_latent_dim)
        self.foreground = StyleGenerator(config.resolution, config.fg_latent_dim, fg_channels, config.mapping_depth)
        self.background = StyleGenerator(config.resolution, config.bg_latent_dim, bg_channels, config.mapping_depth)
        self.mask_generator = MaskGenerator(
            fg_channels[config.resolution], config.mask_head_channels, config.use_fine_mask
        )

    @property
    def resolution(self) -> int:
        return self.config.resolution

    @property
    def device(self) -> torch.device:
        return self.foreground.initial_constant.device

    def sample_latents(self, batch: int, rng: Optional[torch.Generator] = None) -> LatentCode:
        """Standard-normal foreground latents; background latents are their prefix.

        ``rng`` is a CPU generator so draws do not depend on the device.
        """
        require(batch >= 1, f"batch must be >= 1, got {batch}", batch=batch)
        z = torch.randn(batch, self.config.fg_latent_dim, generator=rng)
        return LatentCode.from_foreground(z.to(self.device), self.config.bg_latent_dim)

    def map_latents(self, latents: LatentCode, psi: float = 1.0) -> LatentCode:
        return LatentCode(
            z_fg=latents.z_fg,
            z_bg=latents.z_bg,
            w_fg=self.foreground.map(latents.z_fg, psi),
            w_bg=self.background.map(latents.z_bg, psi),
        )

    def generate_foreground(self, latents: LatentCode, psi: float = 1.0, noise_mode: str = 'random',
                            ws: Optional[torch.Tensor] = None) -> Tuple[torch.Tensor, torch.Tensor]:
        """Return ``(image, features)``; ``ws`` overrides mapping when given."""
        if ws is None:
            ws = latents.w_fg if latents.w_fg is not None else self.foreground.map(latents.z_fg, psi)
        return self.foreground.synthesize(ws, noise_mode)

    def generate_background(self, latents: LatentCode, psi: float = 1.0, noise_mode: str = 'random',
                            ws: Optional[torch.Tensor] = None) -> torch.Tensor:
        if ws is None:
            ws = latents.w_bg if latents.w_bg is not None else self.background.map(latents.z_bg, psi)
        image, _ = self.background.synthesize(ws, noise_mode)
        return image

    def generate_mask(self, features: torch.Tensor, gamma: float = 1.0) -> MaskBundle:
        return self.mask_generator(features, gamma)

    def synthesize(self, latents: LatentCode, gamma: float = 1.0, psi: float = 1.0,
                   noise_mode: str = 'random') -> LayeredSample:
        """Full pipeline: foreground, background, masks and their composite."""
        fg, features = self.generate_foreground(latents, psi, noise_mode)
        bg = self.generate_background(latents, psi, noise_mode)
        masks = self.generate_mask(features, gamma)
        return LayeredSample(foreground=fg, background=bg, masks=masks, composite=composite(fg, bg, masks.mask))

    def synthesize_mixed(self, latents_a: LatentCode, latents_b: LatentCode, bands: Sequence[str],
                         gamma: float = 1.0, psi: float = 1.0, noise_mode: str = 'const') -> LayeredSample:
        """Foreground styles of A with the ``bands`` layers taken from B; background of A."""
        ws_a = self.foreground.map(latents_a.z_fg, psi)
        ws_b = self.foreground.map(latents_b.z_fg, psi)
        ws = mix_styles(ws_a, ws_b, self.foreground.band_layers(bands))
        fg, features = self.generate_foreground(latents_a, ws=ws, noise_mode=noise_mode)
        bg = self.generate_background(latents_a, psi, noise_mode)
        masks = self.generate_mask(features, gamma)
        return LayeredSample(foreground=fg, background=bg, masks=masks, composite=composite(fg, bg, masks.mask))

    @torch.no_grad()
    def update_mean_styles(self, n_samples: int = 10000, seed: int = 0) -> None:
        """Re-estimate the truncation centers of both branches."""
        rng = torch.Generator().manual_seed(seed)
        self.foreground.update_mean_style(n_samples, rng)
        self.background.update_mean_style(n_samples, rng)
        logger.info(f"Truncation mean styles estimated from {n_samples} latents")

    def parameter_groups(self):
        """Parameters of the foreground side (branch + mask heads) and of the background branch."""
        fg = list(self.foreground.parameters()) + list(self.mask_generator.parameters())
        return fg, list(self.background.parameters())
