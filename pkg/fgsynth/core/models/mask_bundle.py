"""Mask outputs of the mask generator."""

from dataclasses import dataclass
from typing import List

import torch


@dataclass
class MaskBundle:
    """Final mask plus the coarse/fine parts it was built from.

    All tensors are [B, 1, H, W] in [0, 1].
    """

    mask: torch.Tensor
    coarse: torch.Tensor
    fine: torch.Tensor
    fine_contribution: torch.Tensor

    def __len__(self) -> int:
        return self.mask.shape[0]

    def slice(self, start: int, stop: int) -> 'MaskBundle':
        return MaskBundle(
            mask=self.mask[start:stop],
            coarse=self.coarse[start:stop],
            fine=self.fine[start:stop],
            fine_contribution=self.fine_contribution[start:stop],
        )

    def detach(self) -> 'MaskBundle':
        return MaskBundle(
            mask=self.mask.detach(),
            coarse=self.coarse.detach(),
            fine=self.fine.detach(),
            fine_contribution=self.fine_contribution.detach(),
        )

    @staticmethod
    def cat(bundles: List['MaskBundle']) -> 'MaskBundle':
        return MaskBundle(
            mask=torch.cat([b.mask for b in bundles]),
            coarse=torch.cat([b.coarse for b in bundles]),
            fine=torch.cat([b.fine for b in bundles]),
            fine_contribution=torch.cat([b.fine_contribution for b in bundles]),
        )

    def coverage(self) -> float:
        """Mean of the final mask over the batch."""
        return float(self.mask.detach().mean())
