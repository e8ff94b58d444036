"""Building blocks shared by the generators and the discriminator.

Equalized learning-rate layers: weights are stored at unit variance and
scaled by 1/sqrt(fan_in) on every forward pass.
"""

import math
from typing import List, Optional

import torch
import torch.nn.functional as F
from torch import nn

NOISE_MODES = ('random', 'const', 'none')


class EqualizedWeight(nn.Module):
    def __init__(self, shape: List[int]):
        super().__init__()
        self.c = 1 / math.sqrt(math.prod(shape[1:]))
        self.weight = nn.Parameter(torch.randn(shape))

    def forward(self) -> torch.Tensor:
        return self.weight * self.c


class EqualizedLinear(nn.Module):
    def __init__(self, in_features: int, out_features: int, bias: float = 0.0):
        super().__init__()
        self.weight = EqualizedWeight([out_features, in_features])
        self.bias = nn.Parameter(torch.ones(out_features) * bias)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return F.linear(x, self.weight(), bias=self.bias)


class EqualizedConv2d(nn.Module):
    def __init__(self, in_features: int, out_features: int, kernel_size: int, padding: int = 0, bias: float = 0.0):
        super().__init__()
        self.padding = padding
        self.weight = EqualizedWeight([out_features, in_features, kernel_size, kernel_size])
        self.bias = nn.Parameter(torch.ones(out_features) * bias)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return F.conv2d(x, self.weight(), bias=self.bias, padding=self.padding)


class PixelNorm(nn.Module):
    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x * torch.rsqrt(x.square().mean(dim=1, keepdim=True) + 1e-8)


class MappingNetwork(nn.Module):
    """Pixel-normalized MLP from z to w (shallow: ``n_layers`` linear layers)."""

    def __init__(self, z_dim: int, w_dim: int, n_layers: int):
        super().__init__()
        layers: List[nn.Module] = [PixelNorm()]
        for i in range(n_layers):
            layers.append(EqualizedLinear(z_dim if i == 0 else w_dim, w_dim))
            layers.append(nn.LeakyReLU(0.2))
        self.net = nn.Sequential(*layers)

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        return self.net(z)


class Conv2dWeightModulate(nn.Module):
    """Convolution whose weights are scaled per sample by a style, then demodulated."""

    def __init__(self, in_features: int, out_features: int, kernel_size: int, demodulate: bool = True, eps: float = 1e-8):
        super().__init__()
        self.out_features = out_features
        self.demodulate = demodulate
        self.padding = (kernel_size - 1) // 2
        self.weight = EqualizedWeight([out_features, in_features, kernel_size, kernel_size])
        self.eps = eps

    def forward(self, x: torch.Tensor, s: torch.Tensor) -> torch.Tensor:
        b, _, h, w = x.shape
        weights = self.weight()[None] * s[:, None, :, None, None]
        if self.demodulate:
            sigma_inv = torch.rsqrt(weights.square().sum(dim=(2, 3, 4), keepdim=True) + self.eps)
            weights = weights * sigma_inv
        x = x.reshape(1, -1, h, w)
        weights = weights.reshape(b * self.out_features, *weights.shape[2:])
        x = F.conv2d(x, weights, padding=self.padding, groups=b)
        return x.reshape(b, self.out_features, h, w)


class NoiseInjection(nn.Module):
    """Per-pixel noise scaled by a learned factor; a fixed draw is kept for ``const`` mode."""

    def __init__(self, resolution: int):
        super().__init__()
        self.resolution = resolution
        self.register_buffer('const_noise', torch.randn(1, 1, resolution, resolution))
        self.scale = nn.Parameter(torch.zeros(1))

    def forward(self, x: torch.Tensor, noise_mode: str = 'random') -> torch.Tensor:
        if noise_mode == 'none':
            return x
        if noise_mode == 'const':
            noise = self.const_noise.to(x.dtype)
        else:
            noise = torch.randn(x.shape[0], 1, x.shape[2], x.shape[3], device=x.device, dtype=x.dtype)
        return x + self.scale * noise


class StyleBlock(nn.Module):
    """Modulated 3x3 conv, noise, bias and leaky ReLU."""

    def __init__(self, w_dim: int, in_features: int, out_features: int, resolution: int):
        super().__init__()
        self.to_style = EqualizedLinear(w_dim, in_features, bias=1.0)
        self.conv = Conv2dWeightModulate(in_features, out_features, kernel_size=3)
        self.noise = NoiseInjection(resolution)
        self.bias = nn.Parameter(torch.zeros(out_features))
        self.activation = nn.LeakyReLU(0.2)

    def forward(self, x: torch.Tensor, w: torch.Tensor, noise_mode: str = 'random') -> torch.Tensor:
        x = self.conv(x, self.to_style(w))
        x = self.noise(x, noise_mode)
        return self.activation(x + self.bias[None, :, None, None])


class ToRGB(nn.Module):
    """Modulated 1x1 projection to RGB followed by tanh."""

    def __init__(self, w_dim: int, features: int):
        super().__init__()
        self.to_style = EqualizedLinear(w_dim, features, bias=1.0)
        self.conv = Conv2dWeightModulate(features, 3, kernel_size=1, demodulate=False)
        self.bias = nn.Parameter(torch.zeros(3))

    def forward(self, x: torch.Tensor, w: torch.Tensor) -> torch.Tensor:
        x = self.conv(x, self.to_style(w))
        return torch.tanh(x + self.bias[None, :, None, None])


class Smooth(nn.Module):
    """3x3 binomial blur per channel."""

    def __init__(self):
        super().__init__()
        kernel = torch.tensor([[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]])
        self.register_buffer('kernel', (kernel / kernel.sum())[None, None])
        self.pad = nn.ReplicationPad2d(1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b, c, h, w = x.shape
        x = self.pad(x.reshape(-1, 1, h, w))
        x = F.conv2d(x, self.kernel.to(x.dtype))
        return x.reshape(b, c, h, w)


class UpSample(nn.Module):
    def __init__(self):
        super().__init__()
        self.smooth = Smooth()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = F.interpolate(x, scale_factor=2, mode='bilinear', align_corners=False)
        return self.smooth(x)


class DownSample(nn.Module):
    def __init__(self):
        super().__init__()
        self.smooth = Smooth()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.smooth(x)
        return F.interpolate(x, (x.shape[2] // 2, x.shape[3] // 2), mode='bilinear', align_corners=False)


class MiniBatchStdDev(nn.Module):
    """Appends the mean per-group feature standard deviation as an extra channel.

    The group is the largest divisor of the batch not above ``group_size``.
    """

    def __init__(self, group_size: int = 4):
        super().__init__()
        self.group_size = group_size

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b, c, h, w = x.shape
        g = max(d for d in range(1, min(self.group_size, b) + 1) if b % d == 0)
        y = x.reshape(g, -1, c, h, w)
        y = (y - y.mean(dim=0)).square().mean(dim=0)
        y = (y + 1e-8).sqrt().mean(dim=(1, 2, 3))
        y = y.reshape(-1, 1, 1, 1).repeat(g, 1, h, w)
        return torch.cat([x, y], dim=1)


def conv_weight_numel(module: nn.Module, kernel_size: Optional[int] = 3) -> int:
    """Count modulated-conv weights of one kernel size (for channel-budget checks)."""
    total = 0
    for sub in module.modules():
        if isinstance(sub, Conv2dWeightModulate):
            weight = sub.weight.weight
            if kernel_size is None or weight.shape[-1] == kernel_size:
                total += weight.numel()
    return total
