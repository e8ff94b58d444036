"""Latent code model shared by the foreground and background branches."""

from dataclasses import dataclass, replace
from typing import Optional

import torch


@dataclass
class LatentCode:
    """Foreground/background noise vectors and their mapped styles.

    ``z_bg`` is the leading ``D_bg`` entries of ``z_fg``. ``w_fg``/``w_bg`` are
    per-layer styles [B, num_ws, w_dim] once mapped, ``None`` before.
    """

    z_fg: torch.Tensor
    z_bg: torch.Tensor
    w_fg: Optional[torch.Tensor] = None
    w_bg: Optional[torch.Tensor] = None

    def __len__(self) -> int:
        return self.z_fg.shape[0]

    def slice(self, start: int, stop: int) -> 'LatentCode':
        """Return the latents of samples [start, stop)."""
        return LatentCode(
            z_fg=self.z_fg[start:stop],
            z_bg=self.z_bg[start:stop],
            w_fg=None if self.w_fg is None else self.w_fg[start:stop],
            w_bg=None if self.w_bg is None else self.w_bg[start:stop],
        )

    def to(self, device) -> 'LatentCode':
        return replace(
            self,
            z_fg=self.z_fg.to(device),
            z_bg=self.z_bg.to(device),
            w_fg=None if self.w_fg is None else self.w_fg.to(device),
            w_bg=None if self.w_bg is None else self.w_bg.to(device),
        )

    @classmethod
    def from_foreground(cls, z_fg: torch.Tensor, bg_dim: int) -> 'LatentCode':
        """Build a code whose background part is the prefix of ``z_fg``."""
        return cls(z_fg=z_fg, z_bg=z_fg[:, :bg_dim])
