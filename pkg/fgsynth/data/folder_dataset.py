"""Image-folder ingestion and batch streaming."""

import logging
from pathlib import Path
from typing import Iterator, List

import torch
from torch.utils.data import DataLoader, Dataset, Sampler

from core.exceptions import DatasetError
from core.models.dataset_spec import DatasetSpec
from utils.image_io import is_decodable, list_images, load_image
from utils.validation import require

logger = logging.getLogger(__name__)


class FolderImageDataset(Dataset):
    """Decodable images of a folder, resized (and optionally center-cropped) to ``resolution``."""

    def __init__(self, path, resolution: int, center_crop: bool = False):
        candidates = list_images(path)
        self.files: List[Path] = [f for f in candidates if is_decodable(f)]
        if not self.files:
            raise DatasetError(f"No decodable images in {path}", details={'path': str(path)})
        skipped = len(candidates) - len(self.files)
        if skipped:
            logger.warning(f"Skipped {skipped} undecodable file(s) in {path}")
        self.resolution = resolution
        self.center_crop = center_crop
        logger.info(f"Image folder {path}: {len(self.files)} images at {resolution}x{resolution}")

    def __len__(self) -> int:
        return len(self.files)

    def __getitem__(self, index: int) -> torch.Tensor:
        return load_image(self.files[index], self.resolution, self.center_crop)


class WraparoundBatchSampler(Sampler):
    """Endless full batches over successive seeded permutations.

    ``skip`` drops that many indices from the front of the stream without
    loading them, so a resumed run continues where the first one stopped.
    """

    def __init__(self, size: int, batch_size: int, generator: torch.Generator, skip: int = 0):
        require(skip >= 0, f"skip must be >= 0, got {skip}", skip=skip)
        self.size = size
        self.batch_size = batch_size
        self.generator = generator
        self.skip = skip

    def __iter__(self) -> Iterator[List[int]]:
        batch: List[int] = []
        skip = self.skip
        while True:
            order = torch.randperm(self.size, generator=self.generator).tolist()
            if skip >= self.size:
                skip -= self.size
                continue
            for index in order[skip:]:
                batch.append(index)
                if len(batch) == self.batch_size:
                    yield batch
                    batch = []
            skip = 0


def batch_stream(dataset: Dataset, batch_size: int, seed: int = 0, wraparound: bool = False,
                 num_workers: int = 0, skip: int = 0) -> Iterator[torch.Tensor]:
    """Seeded shuffled batches: one epoch (last batch short) or an endless stream.

    The loader seeds its workers from its own generator, never from the
    global torch RNG. ``skip`` (endless streams only) starts that many
    samples into the stream.
    """
    require(batch_size >= 1, f"batch_size must be >= 1, got {batch_size}", batch_size=batch_size)
    require(wraparound or skip == 0, 'skip needs an endless stream', skip=skip)
    generator = torch.Generator().manual_seed(seed)
    worker_args = {'num_workers': num_workers}
    if num_workers > 0:
        worker_args['prefetch_factor'] = 2
    if wraparound:
        sampler = WraparoundBatchSampler(len(dataset), batch_size, generator, skip)
        loader = DataLoader(dataset, batch_sampler=sampler, generator=torch.Generator().manual_seed(seed),
                            **worker_args)
    else:
        loader = DataLoader(dataset, batch_size=batch_size, shuffle=True, generator=generator, **worker_args)
    yield from loader


def load_folder(path, resolution: int, batch_size: int, seed: int = 0, center_crop: bool = False,
                wraparound: bool = False, num_workers: int = 0) -> Iterator[torch.Tensor]:
    """Stream [B, 3, R, R] batches in [-1, 1] from an image folder."""
    dataset = FolderImageDataset(path, resolution, center_crop)
    return batch_stream(dataset, batch_size, seed, wraparound, num_workers)


def build_dataset(spec: DatasetSpec) -> Dataset:
    """Training dataset for ``spec`` (folder images or lazily rendered oracle samples)."""
    if spec.source == 'folder':
        return FolderImageDataset(spec.path, spec.resolution, spec.center_crop)
    from data.oracle_dataset import OracleDataset
    return OracleDataset(spec.oracle_size, spec.resolution, spec.seed)
