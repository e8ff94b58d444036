"""Synthetic oracle dataset with exact ground-truth mattes.

Each sample is a feathered blob (an ellipse with a few angular harmonics)
plus thin whisker strokes, composited over a textured background. Foreground
textures are warm (red exceeds blue by 0.5-0.7) and background textures cool
(blue exceeds red by the same margin), so ``oracle_segment`` recovers the
matte of any image drawn from this distribution from color alone.
"""

import json
import logging
import math
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np
import torch
from torch.utils.data import Dataset
from tqdm import tqdm

from core.exceptions import DatasetError
from core.imaging import composite
from core.models.dataset_spec import OracleSample
from utils.image_io import load_image, load_mask, save_image, save_mask
from utils.validation import require

logger = logging.getLogger(__name__)

COVERAGE_BAND = (0.25, 0.55)
WHISKER_ALPHA = 0.7
WHISKER_BUDGET = 0.015
TEXTURE_AMPLITUDE = 0.25
MANIFEST_NAME = 'manifest.json'


def render_oracle_sample(seed: int, index: int, resolution: int,
                         coverage_band: Tuple[float, float] = COVERAGE_BAND) -> OracleSample:
    """Render sample ``index`` of the dataset seeded by ``seed``.

    Each index draws from its own stream, so any subset renders identically
    regardless of order or worker.
    """
    rng = np.random.default_rng([seed, index])
    blob = _blob_alpha(rng, resolution, coverage_band)
    alpha, whisker_pixels = _add_whiskers(rng, blob, resolution)

    fg = _texture(rng, resolution, _warm_color(rng))
    bg = _texture(rng, resolution, _cool_color(rng))

    fg_t = torch.from_numpy(fg).float()
    bg_t = torch.from_numpy(bg).float()
    gt = torch.from_numpy(alpha[None]).float()
    image = composite(fg_t[None], bg_t[None], gt[None])[0]
    return OracleSample(image=image, gt_mask=gt, fg=fg_t, bg=bg_t, whisker_pixels=whisker_pixels)


def generate_oracle_dataset(n: int, resolution: int, seed: int = 0,
                            coverage_band: Tuple[float, float] = COVERAGE_BAND,
                            progress: bool = False) -> List[OracleSample]:
    """Render ``n`` oracle samples; the same seed gives bit-identical samples."""
    require(n >= 1, f"n must be >= 1, got {n}", n=n)
    indices = tqdm(range(n), desc='oracle', disable=not progress)
    return [render_oracle_sample(seed, i, resolution, coverage_band) for i in indices]


def oracle_segment(images: torch.Tensor) -> torch.Tensor:
    """Binary foreground mask [B, 1, H, W] from the warm/cool palette rule."""
    return (images[:, 0:1] - images[:, 2:3]) > 0


class OracleDataset(Dataset):
    """Lazily rendered oracle images for training (image only)."""

    def __init__(self, size: int, resolution: int, seed: int = 0):
        require(size >= 1, f"oracle size must be >= 1, got {size}", size=size)
        self.size = size
        self.resolution = resolution
        self.seed = seed

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, index: int) -> torch.Tensor:
        return render_oracle_sample(self.seed, index, self.resolution).image


def persist_oracle_dataset(samples: Sequence[OracleSample], directory, seed: int,
                           coverage_band: Tuple[float, float] = COVERAGE_BAND) -> Path:
    """Write NNNNNN_image.png / NNNNNN_mask.png pairs and a manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, sample in enumerate(samples):
        image_name, mask_name = f"{i:06d}_image.png", f"{i:06d}_mask.png"
        save_image(sample.image, directory / image_name)
        save_mask(sample.gt_mask, directory / mask_name)
        entries.append({
            'index': i,
            'image': image_name,
            'mask': mask_name,
            'coverage': sample.coverage,
            'whisker_pixels': sample.whisker_pixels,
        })
    manifest = {
        'seed': seed,
        'resolution': int(samples[0].image.shape[-1]) if samples else None,
        'count': len(entries),
        'coverage_band': list(coverage_band),
        'samples': entries,
    }
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2))
    logger.info(f"Persisted {len(entries)} oracle samples to {directory}")
    return directory


def load_oracle_directory(directory) -> Tuple[torch.Tensor, torch.Tensor]:
    """Read a persisted oracle dataset back as ``(images, masks)`` batches."""
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.is_file():
        raise DatasetError(f"No oracle manifest in {directory}", details={'path': str(directory)})
    manifest = json.loads(manifest_path.read_text())
    resolution = manifest['resolution']
    images = [load_image(directory / e['image'], resolution) for e in manifest['samples']]
    masks = [load_mask(directory / e['mask'], resolution) for e in manifest['samples']]
    if not images:
        raise DatasetError(f"Oracle manifest in {directory} lists no samples")
    return torch.stack(images), torch.stack(masks)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _grid(resolution: int) -> Tuple[np.ndarray, np.ndarray]:
    coords = np.arange(resolution, dtype=np.float64) + 0.5
    return np.meshgrid(coords, coords, indexing='xy')


def _blob_alpha(rng: np.random.Generator, resolution: int, coverage_band: Tuple[float, float]) -> np.ndarray:
    xx, yy = _grid(resolution)
    area = rng.uniform(*coverage_band) * resolution * resolution
    radius = math.sqrt(area / math.pi)
    aspect = rng.uniform(0.75, 1.33)
    semi_a, semi_b = radius * math.sqrt(aspect), radius / math.sqrt(aspect)
    theta = rng.uniform(0, math.pi)
    cx, cy = resolution / 2 + rng.uniform(-0.05, 0.05, size=2) * resolution
    feather = rng.uniform(1.0, 2.0)
    harmonics = [(k, rng.uniform(0, 0.06), rng.uniform(0, 2 * math.pi)) for k in (2, 3, 4)]

    u = (xx - cx) * math.cos(theta) + (yy - cy) * math.sin(theta)
    v = -(xx - cx) * math.sin(theta) + (yy - cy) * math.cos(theta)
    rho = np.hypot(u / semi_a, v / semi_b)
    phi = np.arctan2(v / semi_b, u / semi_a)
    edge = 1 + sum(amp * np.cos(k * phi + phase) for k, amp, phase in harmonics)
    distance = (rho - edge) * radius
    return np.clip(0.5 - distance / feather, 0.0, 1.0)


def _add_whiskers(rng: np.random.Generator, blob: np.ndarray, resolution: int) -> Tuple[np.ndarray, int]:
    """Draw 1-px strokes leaving the blob boundary; returns (alpha, stroke pixel count)."""
    alpha = blob.copy()
    budget = int(WHISKER_BUDGET * blob.sum())
    inside = np.argwhere(blob > 0.5)
    if budget == 0 or len(inside) == 0:
        return alpha, 0
    center = inside.mean(axis=0)
    count = 0
    for _ in range(rng.integers(2, 5)):
        angle = rng.uniform(0, 2 * math.pi)
        direction = np.array([math.sin(angle), math.cos(angle)])
        # walk outward from the center to the boundary
        start = center.copy()
        while _inside(start, resolution) and blob[int(start[0]), int(start[1])] > 0.5:
            start += direction * 0.5
        jitter = rng.uniform(-0.3, 0.3)
        stroke = np.array([math.sin(angle + jitter), math.cos(angle + jitter)])
        length = rng.uniform(resolution / 16, resolution / 10)
        for t in np.arange(0.0, length, 0.5):
            row, col = np.floor(start + stroke * t).astype(int)
            if not _inside((row, col), resolution):
                break
            if alpha[row, col] < WHISKER_ALPHA:
                if count >= budget:
                    return alpha, count
                alpha[row, col] = WHISKER_ALPHA
                count += 1
    return alpha, count


def _inside(point, resolution: int) -> bool:
    return 0 <= point[0] < resolution and 0 <= point[1] < resolution


def _warm_color(rng: np.random.Generator) -> np.ndarray:
    blue = rng.uniform(-0.5, -0.1)
    return np.array([blue + rng.uniform(0.5, 0.7), rng.uniform(-0.4, 0.4), blue])


def _cool_color(rng: np.random.Generator) -> np.ndarray:
    red = rng.uniform(-0.5, -0.1)
    return np.array([red, rng.uniform(-0.4, 0.4), red + rng.uniform(0.5, 0.7)])


def _texture(rng: np.random.Generator, resolution: int, color: np.ndarray) -> np.ndarray:
    """Base color plus a gray sinusoidal pattern; channel differences stay fixed."""
    xx, yy = _grid(resolution)
    pattern = np.zeros((resolution, resolution))
    weights = rng.uniform(0.2, 1.0, size=3)
    for weight in weights:
        freq = rng.uniform(1.0, 4.0)
        angle = rng.uniform(0, math.pi)
        phase = rng.uniform(0, 2 * math.pi)
        pattern += weight * np.sin(
            2 * math.pi * freq * (xx * math.cos(angle) + yy * math.sin(angle)) / resolution + phase
        )
    pattern *= TEXTURE_AMPLITUDE / weights.sum()
    return color[:, None, None] + pattern[None]
