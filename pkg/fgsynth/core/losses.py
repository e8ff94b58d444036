"""Training objectives as pure functions of tensors.

Each function returns a scalar tensor so callers can back-propagate;
the totals read a LossReport and apply the coefficients it echoes.
"""

from typing import Callable, Tuple

import torch
import torch.nn.functional as F

from core.imaging import downsample_mask
from core.models.loss_report import DISCRIMINATOR_PARTS, GENERATOR_PARTS, LossReport
from utils.validation import require, require_same_shape, require_unit_interval

AREA_SCOPES = ('sample', 'batch')
FINE_AREA_MODES = ('printed', 'contribution')


def generator_adversarial_loss(logits_fake: torch.Tensor) -> torch.Tensor:
    """Non-saturating generator term: mean softplus(-fake)."""
    return F.softplus(-logits_fake).mean()


def adversarial_losses(logits_real: torch.Tensor, logits_fake: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
    """Return ``(discriminator_term, generator_term)`` of the non-saturating loss."""
    loss_d = F.softplus(-logits_real).mean() + F.softplus(logits_fake).mean()
    return loss_d, generator_adversarial_loss(logits_fake)


def mask_prediction_loss(mask: torch.Tensor, predicted: torch.Tensor) -> torch.Tensor:
    """MSE between the mask reduced to the predictor's side and the prediction."""
    target = downsample_mask(mask, predicted.shape[-1])
    require_same_shape('downsampled mask', target, 'predicted mask', predicted)
    return F.mse_loss(predicted, target)


def mask_consistency_loss(
    x_fg: torch.Tensor,
    predicted_comp: torch.Tensor,
    predictor: Callable[[torch.Tensor], torch.Tensor],
) -> torch.Tensor:
    """MSE between predictor(stopgrad(x_fg)) and the composite's prediction."""
    target = predictor(x_fg.detach())
    require_same_shape('foreground prediction', target, 'composite prediction', predicted_comp)
    return F.mse_loss(predicted_comp, target)


def binarization_loss(coarse: torch.Tensor) -> torch.Tensor:
    """E[min(m, 1 - m)]."""
    return torch.minimum(coarse, 1 - coarse).mean()


def coarse_area_loss(coarse: torch.Tensor, phi1: float, scope: str = 'sample') -> torch.Tensor:
    """Hinge max(0, phi1 - mean(m)) bounding mask coverage from below."""
    require_unit_interval('phi1', phi1, open_interval=True)
    return _hinge(phi1 - _area(coarse, scope))


def fine_area_loss(
    fine_contribution: torch.Tensor,
    phi2: float,
    mode: str = 'printed',
    scope: str = 'sample',
) -> torch.Tensor:
    """Inverse-area hinge on the fine-mask contribution.

    ``printed``: max(0, phi2 - mean(1 - m_fine)), active only when the
    contribution covers more than 1 - phi2 of the image.
    ``contribution``: max(0, mean(m_fine) - phi2).
    """
    require_unit_interval('phi2', phi2, open_interval=True)
    require(mode in FINE_AREA_MODES, f"unknown fine_area_mode '{mode}'", mode=mode)
    if mode == 'printed':
        return _hinge(phi2 - _area(1 - fine_contribution, scope))
    return _hinge(_area(fine_contribution, scope) - phi2)


def background_participation_loss(x_comp: torch.Tensor, x_bg: torch.Tensor) -> torch.Tensor:
    """Mean squared distance between the composite and the background it was built on.

    For ``x_comp = m * x_fg + (1 - m) * x_bg`` this equals ``mean((m * (x_fg - x_bg)) ** 2)``,
    so it pushes the matte toward zero wherever the layers disagree.
    """
    require_same_shape('x_comp', x_comp, 'x_bg', x_bg)
    return F.mse_loss(x_comp, x_bg)


def total_generator_loss(parts: LossReport) -> torch.Tensor:
    """adv + lc*(c_bin*binary + area_coarse) + lf*area_fine, plus gated terms."""
    parts.require(*GENERATOR_PARTS)
    c = parts.coefficients
    total = (
        parts['adv_g']
        + c.lambda_coarse * (c.c_bin * parts['binary'] + parts['area_coarse'])
        + c.lambda_fine * parts['area_fine']
    )
    if parts.consistency_active:
        total = total + parts['consistency']
    if parts.bg_participation_active:
        total = total + parts['bg_participation']
    return total


def total_discriminator_loss(parts: LossReport) -> torch.Tensor:
    """adv + pred, plus the interval-weighted R1 penalty on its steps."""
    parts.require(*DISCRIMINATOR_PARTS)
    total = parts['adv_d'] + parts['pred']
    if parts.r1_active:
        total = total + parts.coefficients.r1_weight * parts['r1']
    return total


def _area(mask: torch.Tensor, scope: str) -> torch.Tensor:
    """Per-sample means [B] for ``sample`` scope, a single mean for ``batch``."""
    require(scope in AREA_SCOPES, f"unknown area scope '{scope}'", scope=scope)
    if scope == 'batch':
        return mask.mean()
    return mask.flatten(1).mean(dim=1)


def _hinge(gap: torch.Tensor) -> torch.Tensor:
    return torch.clamp(gap, min=0).mean()
