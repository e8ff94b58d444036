"""Evaluation result models."""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from utils.validation import require


@dataclass(frozen=True)
class SegmentationReport:
    """Binary segmentation scores, all in [0, 1].

    ``accuracy`` is foreground IoU; plain pixel agreement is
    ``pixel_accuracy``.
    """

    iou_fg: float
    iou_bg: float
    miou: float
    recall: float
    precision: float
    f1: float
    accuracy: float
    pixel_accuracy: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class EmbeddingStats:
    """Mean and covariance of an embedding set."""

    mu: np.ndarray
    sigma: np.ndarray

    @classmethod
    def from_embeddings(cls, embeddings: np.ndarray) -> 'EmbeddingStats':
        """Statistics of [N, D] embeddings (N >= 2)."""
        embeddings = np.asarray(embeddings, dtype=np.float64)
        require(
            embeddings.ndim == 2 and embeddings.shape[0] >= 2,
            f"need at least two [N, D] embeddings, got shape {embeddings.shape}",
        )
        mu = embeddings.mean(axis=0)
        sigma = np.atleast_2d(np.cov(embeddings, rowvar=False))
        return cls(mu=mu, sigma=sigma)

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


@dataclass
class EvaluationReport:
    """Segmentation scores plus Fréchet distance, tagged with the protocol."""

    segmentation: SegmentationReport
    frechet: Optional[float]
    psi: float
    threshold: float
    n_samples: int
    averaging: str = 'micro'
    gt_source: str = 'oracle'

    def to_dict(self) -> Dict[str, Any]:
        row = self.segmentation.to_dict()
        row.update({
            'frechet': self.frechet,
            'psi': self.psi,
            'threshold': self.threshold,
            'n_samples': self.n_samples,
            'averaging': self.averaging,
            'gt_source': self.gt_source,
        })
        return row
