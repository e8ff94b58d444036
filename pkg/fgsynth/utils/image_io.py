"""8-bit PNG/JPEG decode and encode for image and mask tensors."""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import torch
from PIL import Image

from core.exceptions import ResourceNotFoundError

logger = logging.getLogger(__name__)

IMAGE_EXTENSIONS = ('.png', '.jpg', '.jpeg')

PathLike = Union[str, Path]


def center_crop(image: Image.Image) -> Image.Image:
    """Largest centered square."""
    width, height = image.size
    side = min(width, height)
    left = (width - side) // 2
    top = (height - side) // 2
    return image.crop((left, top, left + side, top + side))


def load_image(path: PathLike, resolution: int, crop: bool = False) -> torch.Tensor:
    """Decode to a [3, R, R] float tensor in [-1, 1] (v / 127.5 - 1)."""
    path = Path(path)
    if not path.is_file():
        raise ResourceNotFoundError('image', path)
    with Image.open(path) as image:
        image = image.convert('RGB')
        if crop:
            image = center_crop(image)
        if image.size != (resolution, resolution):
            image = image.resize((resolution, resolution), Image.BICUBIC)
        array = np.asarray(image, dtype=np.uint8)
    return torch.from_numpy(array.copy()).permute(2, 0, 1).float() / 127.5 - 1


def load_mask(path: PathLike, resolution: int) -> torch.Tensor:
    """Decode an 8-bit grayscale mask to [1, R, R] in [0, 1]."""
    path = Path(path)
    if not path.is_file():
        raise ResourceNotFoundError('mask', path)
    with Image.open(path) as image:
        image = image.convert('L')
        if image.size != (resolution, resolution):
            image = image.resize((resolution, resolution), Image.BILINEAR)
        array = np.asarray(image, dtype=np.uint8)
    return torch.from_numpy(array.copy()).float()[None] / 255


def is_decodable(path: PathLike) -> bool:
    try:
        with Image.open(path) as image:
            image.verify()
        return True
    except (OSError, SyntaxError, ValueError) as e:
        logger.warning(f"Skipping undecodable image {path}: {e}")
        return False


def image_to_uint8(image: torch.Tensor) -> np.ndarray:
    """[3, H, W] in [-1, 1] to an [H, W, 3] uint8 array."""
    array = ((image.detach().float().cpu() + 1) * 127.5).round().clamp(0, 255)
    return array.to(torch.uint8).permute(1, 2, 0).numpy()


def mask_to_uint8(mask: torch.Tensor) -> np.ndarray:
    """[1, H, W] in [0, 1] to an [H, W] uint8 array."""
    array = (mask.detach().float().cpu()[0] * 255).round().clamp(0, 255)
    return array.to(torch.uint8).numpy()


def save_image(image: torch.Tensor, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(image_to_uint8(image)).save(path)
    return path


def save_mask(mask: torch.Tensor, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(mask_to_uint8(mask)).save(path)
    return path


def list_images(directory: PathLike):
    """Sorted image files (by extension) directly inside ``directory``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ResourceNotFoundError('folder', directory)
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS)


def image_size(path: PathLike):
    """``(width, height)`` of an image file without decoding its pixels."""
    path = Path(path)
    if not path.is_file():
        raise ResourceNotFoundError('image', path)
    with Image.open(path) as image:
        return image.size
