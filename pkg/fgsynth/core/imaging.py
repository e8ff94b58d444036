"""Differentiable image/mask arithmetic: compositing, normalization, clipping, resampling.

Images are [B, 3, H, W] in [-1, 1]; masks are [B, 1, H, W] in [0, 1].
Everything here is stateless and keeps the input dtype.
"""

from typing import Tuple, Union

import torch
import torch.nn.functional as F

from utils.validation import require, require_finite, require_mask_for, require_same_shape, require_unit_interval

MINMAX_EPS = 1e-8


def composite(fg: torch.Tensor, bg: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Alpha-blend ``fg`` over ``bg``: m*fg + (1-m)*bg."""
    require_same_shape('fg', fg, 'bg', bg)
    require_mask_for('fg', fg, 'mask', mask)
    return mask * fg + (1 - mask) * bg


def minmax_normalize(raw: torch.Tensor, eps: float = MINMAX_EPS) -> torch.Tensor:
    """Rescale each sample to [0, 1] over its (C, H, W) extent.

    A constant sample maps to all zeros.
    """
    require_finite('raw mask', raw)
    dims = tuple(range(1, raw.dim()))
    low = raw.amin(dim=dims, keepdim=True)
    high = raw.amax(dim=dims, keepdim=True)
    return (raw - low) / (high - low + eps)


def combine_masks(
    coarse: torch.Tensor,
    fine: torch.Tensor,
    gamma: Union[float, torch.Tensor],
) -> Tuple[torch.Tensor, torch.Tensor]:
    """Return ``(mask, fine_contribution)``.

    mask = clip(coarse + gamma * fine, 0, 1); fine_contribution = mask - coarse.
    The clip is hard, so gradients vanish where the sum leaves [0, 1].
    """
    require_same_shape('coarse', coarse, 'fine', fine)
    require_unit_interval('gamma', float(gamma))
    mask = torch.clamp(coarse + gamma * fine, 0.0, 1.0)
    return mask, mask - coarse


def downsample_mask(mask: torch.Tensor, target_side: int) -> torch.Tensor:
    """Bilinear reduction of a square mask to ``target_side``."""
    source_side = mask.shape[-1]
    require(
        0 < target_side <= source_side,
        f"target side {target_side} must be in [1, {source_side}]",
        target_side=target_side, source_side=source_side,
    )
    require(
        source_side % target_side == 0,
        f"target side {target_side} does not divide mask side {source_side}",
        target_side=target_side, source_side=source_side,
    )
    if target_side == source_side:
        return mask
    return F.interpolate(mask, size=(target_side, target_side), mode='bilinear', align_corners=False)


def cross_composite(fg: torch.Tensor, masks: torch.Tensor, bg: torch.Tensor) -> torch.Tensor:
    """Composite every fg/mask pair over every background.

    Args:
        fg: [N, 3, H, W] foregrounds
        masks: [N, 1, H, W] their masks
        bg: [M, 3, H, W] backgrounds

    Returns:
        [N, M, 3, H, W] grid; row n holds fg[n] over each background.
    """
    require_mask_for('fg', fg, 'masks', masks)
    require(
        fg.shape[1:] == bg.shape[1:],
        f"background shape {tuple(bg.shape[1:])} does not match foreground shape {tuple(fg.shape[1:])}",
        fg=list(fg.shape), bg=list(bg.shape),
    )
    n, m = fg.shape[0], bg.shape[0]
    rows = composite(
        fg.unsqueeze(1).expand(n, m, *fg.shape[1:]).reshape(n * m, *fg.shape[1:]),
        bg.unsqueeze(0).expand(n, m, *bg.shape[1:]).reshape(n * m, *bg.shape[1:]),
        masks.unsqueeze(1).expand(n, m, *masks.shape[1:]).reshape(n * m, *masks.shape[1:]),
    )
    return rows.reshape(n, m, *fg.shape[1:])
