"""Real-image segmentation by latent optimization.

A latent is optimized until the generator's composite reproduces the input;
the mask is then read off the foreground branch at that latent.
"""

import logging
import math
from typing import Callable, List, Optional, Tuple

import torch
import torch.nn.functional as F
from tqdm import tqdm

from core.embedders import Embedder, PyramidEmbedder
from core.imaging import composite
from core.models.inversion_result import InversionResult
from generators.layered_generator import LayeredGenerator
from utils.validation import require

logger = logging.getLogger(__name__)

SPACES = ('w', 'z')
OPTIMIZERS = ('adam', 'sgd')
DEFAULT_STEPS = 500
RAMPUP = 0.05
RAMPDOWN = 0.25


def projector_lr(step: int, steps: int, lr: float) -> float:
    """Linear ramp-up over the first 5% of steps, cosine ramp-down over the last 25%."""
    t = step / steps
    ramp = min(1.0, (1.0 - t) / RAMPDOWN)
    ramp = 0.5 - 0.5 * math.cos(ramp * math.pi)
    return lr * ramp * min(1.0, t / RAMPUP)


def optimize_latent(
    loss_fn: Callable[[List[torch.Tensor]], torch.Tensor],
    params: List[torch.Tensor],
    steps: int,
    lr: float,
    optimizer: str = 'adam',
    schedule: bool = True,
    progress: bool = False,
) -> List[float]:
    """Minimize ``loss_fn(params)`` in place; return the loss before each step."""
    require(optimizer in OPTIMIZERS, f"unknown optimizer '{optimizer}'", optimizer=optimizer)
    require(steps >= 1, f"steps must be >= 1, got {steps}", steps=steps)
    if optimizer == 'adam':
        opt = torch.optim.Adam(params, lr=lr, betas=(0.9, 0.999))
    else:
        opt = torch.optim.SGD(params, lr=lr)
    history = []
    for step in tqdm(range(steps), desc='invert', disable=not progress):
        if schedule:
            for group in opt.param_groups:
                group['lr'] = projector_lr(step, steps, lr)
        loss = loss_fn(params)
        history.append(float(loss.detach()))
        opt.zero_grad(set_to_none=True)
        loss.backward()
        opt.step()
    return history


def reconstruction_loss(reconstruction: torch.Tensor, target: torch.Tensor, embedder: Embedder,
                        pixel_weight: float = 1.0) -> torch.Tensor:
    """Squared embedding distance plus weighted pixel MSE, averaged over the batch."""
    perceptual = (embedder(reconstruction) - embedder(target)).square().sum(dim=1).mean()
    return perceptual + pixel_weight * F.mse_loss(reconstruction, target)


def invert(
    image: torch.Tensor,
    generator: LayeredGenerator,
    steps: int = DEFAULT_STEPS,
    lr: float = 0.1,
    space: str = 'w',
    embedder: Optional[Embedder] = None,
    optimizer: str = 'adam',
    confidence_threshold: float = 0.05,
    pixel_weight: float = 1.0,
    progress: bool = False,
) -> InversionResult:
    """Optimize a latent so ``generator`` reproduces ``image`` as a composite.

    w-space optimizes one foreground and one background style per image,
    starting from the truncation centers; z-space optimizes the foreground
    latent (background latent is its prefix) starting from zero. Noise is
    held at the generator's constant buffers. Results whose final loss is
    above ``confidence_threshold`` are flagged ``low_confidence``.
    """
    require(space in SPACES, f"unknown inversion space '{space}'", space=space)
    if image.dim() == 3:
        image = image.unsqueeze(0)
    r = generator.resolution
    require(image.dim() == 4 and tuple(image.shape[1:]) == (3, r, r),
            f"image shape {tuple(image.shape)} does not match model resolution {r}", shape=list(image.shape))
    target = image.to(generator.device)
    embedder = embedder or PyramidEmbedder()
    fg_net, bg_net = generator.foreground, generator.background
    batch = target.shape[0]

    if space == 'w':
        if not (bool(fg_net.w_avg_ready) and bool(bg_net.w_avg_ready)):
            generator.update_mean_styles()
        params = [
            fg_net.w_avg.detach().clone().repeat(batch, 1).requires_grad_(True),
            bg_net.w_avg.detach().clone().repeat(batch, 1).requires_grad_(True),
        ]
    else:
        params = [torch.zeros(batch, fg_net.z_dim, device=generator.device, requires_grad=True)]

    def styles(params) -> Tuple[torch.Tensor, torch.Tensor]:
        if space == 'w':
            w_fg, w_bg = params
            return (w_fg.unsqueeze(1).repeat(1, fg_net.num_ws, 1),
                    w_bg.unsqueeze(1).repeat(1, bg_net.num_ws, 1))
        z = params[0]
        return fg_net.map(z), bg_net.map(z[:, :bg_net.z_dim])

    def render(params):
        ws_fg, ws_bg = styles(params)
        fg, features = fg_net.synthesize(ws_fg, noise_mode='const')
        bg, _ = bg_net.synthesize(ws_bg, noise_mode='const')
        masks = generator.generate_mask(features, gamma=1.0)
        return fg, masks.mask, composite(fg, bg, masks.mask)

    def loss_fn(params) -> torch.Tensor:
        return reconstruction_loss(render(params)[2], target, embedder, pixel_weight)

    history = optimize_latent(loss_fn, params, steps, lr, optimizer, schedule=optimizer == 'adam',
                              progress=progress)

    with torch.no_grad():
        fg, mask, reconstruction = render(params)
        final_loss = float(reconstruction_loss(reconstruction, target, embedder, pixel_weight))
        ws_fg, ws_bg = styles(params)
    low_confidence = final_loss > confidence_threshold
    if low_confidence:
        logger.warning(f"Inversion did not converge: loss {final_loss:.4f} > {confidence_threshold}")
    return InversionResult(
        z=params[0].detach() if space == 'z' else None,
        w_fg=ws_fg[:, 0].detach(),
        w_bg=ws_bg[:, 0].detach(),
        reconstruction=reconstruction,
        foreground=fg,
        mask=mask,
        loss=final_loss,
        low_confidence=low_confidence,
        loss_history=history,
    )
