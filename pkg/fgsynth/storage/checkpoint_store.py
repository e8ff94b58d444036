"""Versioned checkpoint container.

A checkpoint is a ``torch.save`` dictionary with ``magic`` and ``version``
keys next to the payload (config echo, state dicts, optimizer states,
iteration, RNG states). Writes go to a temporary file that is renamed into
place.
"""

import logging
import os
import pickle
from pathlib import Path
from typing import Any, Dict, Union

import torch

from core.exceptions import CheckpointError, ResourceNotFoundError

logger = logging.getLogger(__name__)

MAGIC = 'FGSYNTH-CKPT'
VERSION = 1
REQUIRED_KEYS = ('config', 'iteration', 'generator', 'discriminator', 'generator_ema')


def save_checkpoint(path: Union[str, Path], payload: Dict[str, Any]) -> Path:
    """Atomically write ``payload`` inside a versioned container."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    container = {'magic': MAGIC, 'version': VERSION, **payload}
    tmp = path.with_name(path.name + '.tmp')
    torch.save(container, tmp)
    os.replace(tmp, path)
    logger.debug(f"Checkpoint written: {path}")
    return path


def load_checkpoint(path: Union[str, Path], map_location='cpu') -> Dict[str, Any]:
    """Read and validate a checkpoint container.

    Raises:
        ResourceNotFoundError: If the file does not exist
        CheckpointError: If the file is not a readable container of a known version
    """
    path = Path(path)
    if not path.is_file():
        raise ResourceNotFoundError('checkpoint', path)
    try:
        container = torch.load(path, map_location=map_location, weights_only=True)
    except (RuntimeError, pickle.UnpicklingError, EOFError, OSError) as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}", details={'path': str(path)})
    if not isinstance(container, dict) or container.get('magic') != MAGIC:
        raise CheckpointError(f"{path} is not a checkpoint container", details={'path': str(path)})
    version = container.get('version')
    if not isinstance(version, int) or version > VERSION:
        raise CheckpointError(
            f"Unsupported checkpoint version {version!r} (supported <= {VERSION})",
            details={'path': str(path), 'version': version},
        )
    missing = [key for key in REQUIRED_KEYS if key not in container]
    if missing:
        raise CheckpointError(f"Checkpoint {path} lacks {', '.join(missing)}", details={'missing': missing})
    return container
