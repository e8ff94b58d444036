"""Segmentation metrics and the Fréchet distance between embedding statistics."""

from dataclasses import dataclass
from typing import Iterable, List

import numpy as np
import scipy.linalg
import torch

from core.exceptions import NumericalError
from core.models.reports import EmbeddingStats, SegmentationReport
from utils.validation import require, require_same_shape, require_unit_interval

AVERAGING_MODES = ('micro', 'macro')
PSD_TOLERANCE = 1e-6


def binarize(mask: torch.Tensor, threshold: float = 0.5) -> torch.Tensor:
    """1 where mask > threshold (strict), else 0, as a bool tensor."""
    require_unit_interval('threshold', threshold, open_interval=True)
    return mask > threshold


@dataclass(frozen=True)
class ConfusionCounts:
    """Pixel counts of a binary segmentation; adding counts merges shards."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __add__(self, other: 'ConfusionCounts') -> 'ConfusionCounts':
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn
        )

    @classmethod
    def from_masks(cls, pred: torch.Tensor, gt: torch.Tensor) -> 'ConfusionCounts':
        require_same_shape('pred', pred, 'gt', gt)
        pred = pred.bool()
        gt = gt.bool()
        return cls(
            tp=int((pred & gt).sum()),
            fp=int((pred & ~gt).sum()),
            fn=int((~pred & gt).sum()),
            tn=int((~pred & ~gt).sum()),
        )

    def report(self) -> SegmentationReport:
        tp, fp, fn, tn = self.tp, self.fp, self.fn, self.tn
        iou_fg = _ratio(tp, tp + fp + fn)
        iou_bg = _ratio(tn, tn + fp + fn)
        precision = _ratio(tp, tp + fp) if tp + fp else float(tp + fn == 0)
        recall = _ratio(tp, tp + fn) if tp + fn else float(tp + fp == 0)
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
        return SegmentationReport(
            iou_fg=iou_fg,
            iou_bg=iou_bg,
            miou=(iou_fg + iou_bg) / 2,
            recall=recall,
            precision=precision,
            f1=f1,
            accuracy=iou_fg,
            pixel_accuracy=_ratio(tp + tn, tp + fp + fn + tn),
        )


def segmentation_metrics(pred: torch.Tensor, gt: torch.Tensor) -> SegmentationReport:
    """Pixel-count scores of binary ``pred`` against binary ``gt`` (foreground = 1)."""
    return ConfusionCounts.from_masks(pred, gt).report()


def per_sample_counts(pred: torch.Tensor, gt: torch.Tensor) -> List[ConfusionCounts]:
    require_same_shape('pred', pred, 'gt', gt)
    return [ConfusionCounts.from_masks(p, g) for p, g in zip(pred, gt)]


def aggregate(counts: Iterable[ConfusionCounts], averaging: str = 'micro') -> SegmentationReport:
    """Combine per-sample counts.

    ``micro`` sums pixel counts before scoring; ``macro`` averages
    per-sample reports.
    """
    require(averaging in AVERAGING_MODES, f"unknown averaging '{averaging}'", averaging=averaging)
    counts = list(counts)
    require(len(counts) > 0, 'no samples to aggregate')
    if averaging == 'micro':
        total = ConfusionCounts()
        for c in counts:
            total = total + c
        return total.report()
    reports = [c.report() for c in counts]
    fields = reports[0].to_dict().keys()
    means = {name: float(np.mean([r.to_dict()[name] for r in reports])) for name in fields}
    return SegmentationReport(**means)


def frechet_distance(a: EmbeddingStats, b: EmbeddingStats) -> float:
    """||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a S_b)^(1/2)).

    The trace of the cross term is taken from the eigenvalues of
    sqrt(S_a) S_b sqrt(S_a), which is symmetric. Eigenvalues in
    [-1e-6, 0) are clamped to zero; anything more negative is an error.
    """
    require(
        a.mu.shape == b.mu.shape and a.sigma.shape == b.sigma.shape,
        f"embedding dims differ: {a.mu.shape} vs {b.mu.shape}",
        dims=[list(a.mu.shape), list(b.mu.shape)],
    )
    sqrt_a = _psd_sqrt(a.sigma, 'first covariance')
    cross = sqrt_a @ b.sigma @ sqrt_a
    cross_eigs = _psd_eigenvalues((cross + cross.T) / 2, 'covariance product')
    diff = a.mu - b.mu
    trace = np.trace(a.sigma) + np.trace(b.sigma) - 2 * np.sqrt(cross_eigs).sum()
    _psd_eigenvalues(b.sigma, 'second covariance')
    return float(diff @ diff + trace)


def _psd_eigenvalues(matrix: np.ndarray, name: str) -> np.ndarray:
    eigenvalues = scipy.linalg.eigh(matrix, eigvals_only=True)
    if eigenvalues.min() < -PSD_TOLERANCE:
        raise NumericalError(
            f"{name} is not positive semidefinite (min eigenvalue {eigenvalues.min():.3e})",
            details={'min_eigenvalue': float(eigenvalues.min())},
        )
    return np.clip(eigenvalues, 0.0, None)


def _psd_sqrt(matrix: np.ndarray, name: str) -> np.ndarray:
    matrix = (matrix + matrix.T) / 2
    eigenvalues, vectors = scipy.linalg.eigh(matrix)
    if eigenvalues.min() < -PSD_TOLERANCE:
        raise NumericalError(
            f"{name} is not positive semidefinite (min eigenvalue {eigenvalues.min():.3e})",
            details={'min_eigenvalue': float(eigenvalues.min())},
        )
    return (vectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ vectors.T


def _ratio(num: int, den: int) -> float:
    return 1.0 if den == 0 else num / den
