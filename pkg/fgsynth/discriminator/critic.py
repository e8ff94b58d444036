"""Residual critic with an auxiliary mask predictor on its 16x16 features."""

import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

from generators.layers import DownSample, EqualizedConv2d, EqualizedLinear, MiniBatchStdDev
from utils.validation import require

PREDICTOR_SIDE = 16


@dataclass
class CriticOutput:
    logits: torch.Tensor
    predicted_mask: torch.Tensor
    features: torch.Tensor


class DiscriminatorBlock(nn.Module):
    """Two 3x3 convolutions and a 2x down-sampling with a residual path."""

    def __init__(self, in_features: int, out_features: int):
        super().__init__()
        self.residual = nn.Sequential(DownSample(), EqualizedConv2d(in_features, out_features, kernel_size=1))
        self.block = nn.Sequential(
            EqualizedConv2d(in_features, in_features, kernel_size=3, padding=1),
            nn.LeakyReLU(0.2),
            EqualizedConv2d(in_features, out_features, kernel_size=3, padding=1),
            nn.LeakyReLU(0.2),
        )
        self.down_sample = DownSample()
        self.scale = 1 / math.sqrt(2)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        residual = self.residual(x)
        x = self.down_sample(self.block(x))
        return (x + residual) * self.scale


class MaskPredictor(nn.Module):
    """Two 1x1 convolutions with a skip around them, then a sigmoid projection to one channel."""

    def __init__(self, features: int):
        super().__init__()
        self.residual = nn.Sequential(
            EqualizedConv2d(features, features, kernel_size=1),
            nn.LeakyReLU(0.2),
            EqualizedConv2d(features, features, kernel_size=1),
        )
        self.project = EqualizedConv2d(features, 1, kernel_size=1)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        h = F.leaky_relu(features + self.residual(features), 0.2)
        return torch.sigmoid(self.project(h))


class Discriminator(nn.Module):
    """Realism critic whose trunk also feeds a 16x16 mask predictor.

    Args:
        resolution: Input side, a power of two >= 16
        channel_base: Width at resolution r is min(channel_base // r, channel_max)
        channel_max: Width cap
        mbstd_group: Group size of the minibatch standard deviation layer
    """

    def __init__(self, resolution: int, channel_base: int = 4096, channel_max: int = 256, mbstd_group: int = 4):
        super().__init__()
        require(resolution >= PREDICTOR_SIDE and resolution & (resolution - 1) == 0,
                f"resolution {resolution} must be a power of two >= {PREDICTOR_SIDE}", resolution=resolution)
        self.resolution = resolution

        def width(res: int) -> int:
            return min(channel_base // res, channel_max)

        self.from_rgb = nn.Sequential(EqualizedConv2d(3, width(resolution), kernel_size=1), nn.LeakyReLU(0.2))
        head, tail = [], []
        res = resolution
        while res > 4:
            block = DiscriminatorBlock(width(res), width(res // 2))
            (head if res > PREDICTOR_SIDE else tail).append(block)
            res //= 2
        self.head_blocks = nn.Sequential(*head)
        self.tail_blocks = nn.Sequential(*tail)
        self.mask_predictor = MaskPredictor(width(PREDICTOR_SIDE))

        final = width(4)
        self.std_dev = MiniBatchStdDev(mbstd_group)
        self.conv = EqualizedConv2d(final + 1, final, kernel_size=3, padding=1)
        self.fc = EqualizedLinear(final * 4 * 4, final)
        self.out = EqualizedLinear(final, 1)

    def _check_input(self, x: torch.Tensor) -> None:
        require(
            x.dim() == 4 and x.shape[1] == 3 and x.shape[2] == x.shape[3] == self.resolution,
            f"critic expects [B, 3, {self.resolution}, {self.resolution}] images, got {tuple(x.shape)}",
            shape=list(x.shape),
        )

    def trunk(self, x: torch.Tensor) -> torch.Tensor:
        """Features at the 16x16 tap."""
        self._check_input(x)
        return self.head_blocks(self.from_rgb(x))

    def predict_mask(self, x: torch.Tensor) -> torch.Tensor:
        return self.mask_predictor(self.trunk(x))

    def forward(self, x: torch.Tensor, detach_mask_trunk: bool = False) -> CriticOutput:
        features = self.trunk(x)
        predicted = self.mask_predictor(features.detach() if detach_mask_trunk else features)
        h = self.tail_blocks(features)
        h = F.leaky_relu(self.conv(self.std_dev(h)), 0.2)
        h = F.leaky_relu(self.fc(h.flatten(1)), 0.2)
        return CriticOutput(logits=self.out(h).squeeze(1), predicted_mask=predicted, features=features)

    def discriminate(self, x: torch.Tensor, detach_mask_trunk: bool = False) -> CriticOutput:
        return self(x, detach_mask_trunk)

    def predictor_parameter_count(self) -> int:
        return sum(p.numel() for p in self.mask_predictor.parameters())

    def critic_parameter_count(self) -> int:
        predictor = {id(p) for p in self.mask_predictor.parameters()}
        return sum(p.numel() for p in self.parameters() if id(p) not in predictor)


def r1_penalty(discriminator: Discriminator, x_real: torch.Tensor, r1_gamma: float) -> torch.Tensor:
    """0.5 * gamma * E||grad_x D(x)||^2 on the realism logit of real images."""
    x = x_real.detach().requires_grad_(True)
    logits = discriminator(x).logits
    gradients, = torch.autograd.grad(outputs=logits.sum(), inputs=x, create_graph=True)
    return 0.5 * r1_gamma * gradients.square().sum(dim=(1, 2, 3)).mean()
