"""Mask-quality and image-quality evaluation of a generator.

Generated foreground images are scored twice: their predicted masks are
binarized and compared with ground-truth masks pixel by pixel, and their
embeddings are compared with those of real images by Fréchet distance.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np
import torch

from core.embedders import Embedder, RandomProjectionEmbedder, embed_batches
from core.exceptions import DatasetError
from core.metrics import aggregate, binarize, frechet_distance, per_sample_counts
from core.models.dataset_spec import DatasetSpec
from core.models.reports import EmbeddingStats, EvaluationReport
from core.models.train_config import TrainConfig
from data.folder_dataset import batch_stream, build_dataset
from data.oracle_dataset import load_oracle_directory, oracle_segment, render_oracle_sample
from generators.layered_generator import LayeredGenerator
from utils.image_io import list_images, load_mask
from utils.validation import require

logger = logging.getLogger(__name__)

GT_SOURCES = ('palette', 'oracle', 'directory')
DEFAULT_SAMPLES = 1000


@dataclass
class SampleBatch:
    """Images to score, their predicted soft masks and, for oracle samples, the exact masks."""

    images: torch.Tensor
    masks: torch.Tensor
    start: int
    reference_masks: Optional[torch.Tensor] = None

    def __len__(self) -> int:
        return self.images.shape[0]


# ---------------------------------------------------------------------------
# Sample sources
# ---------------------------------------------------------------------------

@torch.no_grad()
def generated_samples(generator: LayeredGenerator, n_samples: int, psi: float = 1.0, seed: int = 0,
                      batch_size: int = 50, gamma: float = 1.0) -> Iterator[SampleBatch]:
    """Foreground images and masks from ``generator`` with constant noise."""
    rng = torch.Generator().manual_seed(seed)
    for start in range(0, n_samples, batch_size):
        latents = generator.sample_latents(min(batch_size, n_samples - start), rng)
        fg, features = generator.generate_foreground(latents, psi=psi, noise_mode='const')
        masks = generator.generate_mask(features, gamma)
        yield SampleBatch(images=fg.cpu(), masks=masks.mask.cpu(), start=start)


def oracle_samples(n_samples: int, resolution: int, seed: int = 0, batch_size: int = 50) -> Iterator[SampleBatch]:
    """Oracle images whose exact mattes stand in for the model's masks."""
    for start in range(0, n_samples, batch_size):
        samples = [render_oracle_sample(seed, i, resolution)
                   for i in range(start, min(start + batch_size, n_samples))]
        gt = torch.stack([s.gt_mask for s in samples])
        yield SampleBatch(images=torch.stack([s.image for s in samples]), masks=gt, start=start,
                          reference_masks=gt)


def stored_oracle_samples(directory, batch_size: int = 50) -> Iterator[SampleBatch]:
    """Persisted oracle images with their stored mattes as the masks to score."""
    images, masks = load_oracle_directory(directory)
    for start in range(0, images.shape[0], batch_size):
        gt = masks[start:start + batch_size]
        yield SampleBatch(images=images[start:start + batch_size], masks=gt, start=start, reference_masks=gt)


# ---------------------------------------------------------------------------
# Ground-truth sources
# ---------------------------------------------------------------------------

class OraclePaletteGroundTruth:
    """Oracle-distribution images segmented by their warm/cool palette."""

    name = 'palette'

    def check_count(self, n_samples: int) -> None:
        pass

    def masks(self, batch: SampleBatch) -> torch.Tensor:
        return oracle_segment(batch.images)


class StoredOracleGroundTruth:
    """Exact oracle mattes carried by the samples, binarized at ``threshold``."""

    name = 'oracle'

    def __init__(self, threshold: float = 0.5):
        self.threshold = threshold

    def check_count(self, n_samples: int) -> None:
        pass

    def masks(self, batch: SampleBatch) -> torch.Tensor:
        require(batch.reference_masks is not None, 'stored oracle masks need oracle samples')
        return binarize(batch.reference_masks, self.threshold)


class MaskDirectoryGroundTruth:
    """External masks (one image file per sample, sorted by name)."""

    name = 'directory'

    def __init__(self, directory, resolution: int, threshold: float = 0.5):
        self.directory = directory
        self.files = list_images(directory)
        self.resolution = resolution
        self.threshold = threshold

    def check_count(self, n_samples: int) -> None:
        if len(self.files) != n_samples:
            raise DatasetError(
                f"Mask directory {self.directory} has {len(self.files)} masks for {n_samples} samples",
                details={'masks': len(self.files), 'samples': n_samples},
            )

    def masks(self, batch: SampleBatch) -> torch.Tensor:
        files = self.files[batch.start:batch.start + len(batch)]
        masks = torch.stack([load_mask(f, self.resolution) for f in files])
        return binarize(masks, self.threshold)


def build_ground_truth(kind: str, resolution: int, mask_dir: Optional[str] = None):
    require(kind in GT_SOURCES, f"unknown ground-truth source '{kind}'", gt_source=kind)
    if kind == 'palette':
        return OraclePaletteGroundTruth()
    if kind == 'oracle':
        return StoredOracleGroundTruth()
    require(bool(mask_dir), 'directory ground truth needs a mask directory')
    return MaskDirectoryGroundTruth(mask_dir, resolution)


# ---------------------------------------------------------------------------
# Protocol
# ---------------------------------------------------------------------------

def evaluate_model(
    samples: Iterable[SampleBatch],
    ground_truth,
    n_samples: int,
    psi: float = 1.0,
    threshold: float = 0.5,
    averaging: str = 'micro',
    embedder: Optional[Embedder] = None,
    reference_batches: Optional[Iterable[torch.Tensor]] = None,
) -> EvaluationReport:
    """Score sample masks against ground truth; add Fréchet distance when real images are given.

    Raises:
        DatasetError: If an external mask set does not match ``n_samples``
    """
    ground_truth.check_count(n_samples)
    counts = []
    embeddings = []
    seen = 0
    for batch in samples:
        pred = binarize(batch.masks, threshold)
        counts.extend(per_sample_counts(pred, ground_truth.masks(batch)))
        if embedder is not None:
            with torch.no_grad():
                embeddings.append(embedder(batch.images).double().cpu().numpy())
        seen += len(batch)
    if seen != n_samples:
        raise DatasetError(f"Expected {n_samples} samples, got {seen}",
                           details={'expected': n_samples, 'got': seen})
    segmentation = aggregate(counts, averaging)

    frechet = None
    if embedder is not None and reference_batches is not None:
        generated = EmbeddingStats.from_embeddings(np.concatenate(embeddings))
        real = EmbeddingStats.from_embeddings(embed_batches(embedder, reference_batches))
        frechet = frechet_distance(generated, real)

    report = EvaluationReport(
        segmentation=segmentation,
        frechet=frechet,
        psi=psi,
        threshold=threshold,
        n_samples=n_samples,
        averaging=averaging,
        gt_source=ground_truth.name,
    )
    logger.info(f"Evaluated {n_samples} samples (psi={psi}, threshold={threshold}): "
                f"mIoU {segmentation.miou:.4f}, FD {frechet}")
    return report


def real_image_batches(config: TrainConfig, n_images: int, batch_size: int = 50) -> Iterator[torch.Tensor]:
    """First ``n_images`` training images of ``config`` in seeded order."""
    dataset = build_dataset(DatasetSpec.from_train_config(config))
    taken = 0
    for images in batch_stream(dataset, batch_size, seed=config.seed):
        if taken >= n_images:
            break
        images = images[:n_images - taken]
        taken += images.shape[0]
        yield images


def evaluate_generator(
    generator: LayeredGenerator,
    config: TrainConfig,
    n_samples: int = DEFAULT_SAMPLES,
    psi: float = 1.0,
    threshold: float = 0.5,
    averaging: str = 'micro',
    gt_source: str = 'palette',
    mask_dir: Optional[str] = None,
    seed: int = 0,
    frechet: bool = True,
    batch_size: int = 50,
) -> EvaluationReport:
    """Evaluate a trained generator with constant noise and truncation ``psi``."""
    if psi < 1.0 and not bool(generator.foreground.w_avg_ready):
        generator.update_mean_styles(config.truncation_samples, seed=config.seed)
    ground_truth = build_ground_truth(gt_source, config.resolution, mask_dir)
    embedder = RandomProjectionEmbedder(seed=seed) if frechet else None
    return evaluate_model(
        generated_samples(generator, n_samples, psi, seed, batch_size),
        ground_truth,
        n_samples=n_samples,
        psi=psi,
        threshold=threshold,
        averaging=averaging,
        embedder=embedder,
        reference_batches=real_image_batches(config, n_samples, batch_size) if frechet else None,
    )


def evaluate_oracle(n_samples: int, resolution: int, seed: int = 0, threshold: float = 0.5,
                    averaging: str = 'micro', gt_source: str = 'oracle') -> EvaluationReport:
    """Oracle samples scored as if their mattes were model output."""
    ground_truth = build_ground_truth(gt_source, resolution)
    return evaluate_model(oracle_samples(n_samples, resolution, seed), ground_truth, n_samples=n_samples,
                          threshold=threshold, averaging=averaging)


def evaluate_oracle_directory(directory, threshold: float = 0.5, averaging: str = 'micro',
                              gt_source: str = 'palette', mask_dir: Optional[str] = None) -> EvaluationReport:
    """Score a persisted oracle dataset's stored mattes, e.g. against the palette segmenter."""
    batches = list(stored_oracle_samples(directory))
    n_samples = sum(len(b) for b in batches)
    ground_truth = build_ground_truth(gt_source, int(batches[0].images.shape[-1]), mask_dir)
    return evaluate_model(batches, ground_truth, n_samples=n_samples, threshold=threshold, averaging=averaging)
