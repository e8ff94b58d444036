"""PNG grids for eyeballing generated layers."""

import logging
from pathlib import Path
from typing import Optional

import torch
from torchvision.utils import make_grid, save_image

from utils.validation import require, require_rank

logger = logging.getLogger(__name__)

PADDING = 2


def to_display(images: torch.Tensor) -> torch.Tensor:
    """Map [-1, 1] images to [0, 1]."""
    return ((images.detach().float().cpu() + 1) / 2).clamp(0, 1)


def mask_to_display(masks: torch.Tensor) -> torch.Tensor:
    """[B, 1, H, W] masks as 3-channel images in [0, 1]."""
    return masks.detach().float().cpu().clamp(0, 1).expand(-1, 3, -1, -1)


def quadruplet_grid(foreground: torch.Tensor, mask: torch.Tensor, background: torch.Tensor,
                    composite: torch.Tensor) -> torch.Tensor:
    """One row per sample: foreground, mask, background, composite."""
    rows = torch.stack([
        to_display(foreground), mask_to_display(mask), to_display(background), to_display(composite)
    ], dim=1)
    return make_grid(rows.flatten(0, 1), nrow=4, padding=PADDING, pad_value=1.0)


def save_quadruplets(sample, path) -> Path:
    """Write a LayeredSample as a fg / mask / bg / composite grid."""
    grid = quadruplet_grid(sample.foreground, sample.masks.mask, sample.background, sample.composite)
    return _save(grid, path)


def composite_grid(cross: torch.Tensor, foregrounds: Optional[torch.Tensor] = None,
                   backgrounds: Optional[torch.Tensor] = None) -> torch.Tensor:
    """Grid of an [N, M, 3, H, W] crossing; foregrounds head each row, backgrounds each column."""
    require_rank('cross', cross, 5)
    n, m = cross.shape[:2]
    cells = to_display(cross)
    columns = m
    if backgrounds is not None:
        require(backgrounds.shape[0] == m, f"expected {m} backgrounds, got {backgrounds.shape[0]}")
        cells = torch.cat([to_display(backgrounds).unsqueeze(0), cells], dim=0)
    if foregrounds is not None:
        require(foregrounds.shape[0] == n, f"expected {n} foregrounds, got {foregrounds.shape[0]}")
        heads = to_display(foregrounds)
        if backgrounds is not None:
            heads = torch.cat([torch.ones_like(heads[:1]), heads], dim=0)
        cells = torch.cat([heads.unsqueeze(1), cells], dim=1)
        columns += 1
    return make_grid(cells.flatten(0, 1), nrow=columns, padding=PADDING, pad_value=1.0)


def save_composite_grid(cross: torch.Tensor, path, foregrounds=None, backgrounds=None) -> Path:
    return _save(composite_grid(cross, foregrounds, backgrounds), path)


def inversion_quadruplet(image: torch.Tensor, reconstruction: torch.Tensor, mask: torch.Tensor,
                         foreground: torch.Tensor) -> torch.Tensor:
    """Input, reconstruction, mask and the masked foreground on black, one row per image."""
    masked = to_display(foreground) * mask.detach().float().cpu().clamp(0, 1)
    rows = torch.stack([
        to_display(image), to_display(reconstruction), mask_to_display(mask), masked
    ], dim=1)
    return make_grid(rows.flatten(0, 1), nrow=4, padding=PADDING, pad_value=1.0)


def save_inversion_quadruplet(result, image: torch.Tensor, path) -> Path:
    grid = inversion_quadruplet(image, result.reconstruction, result.mask, result.foreground)
    return _save(grid, path)


def _save(grid: torch.Tensor, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_image(grid, path)
    logger.debug(f"Grid written: {path}")
    return path
