"""Run directories and checkpoint containers."""

from .base_storage import BaseRunStorage
from .checkpoint_store import save_checkpoint, load_checkpoint, MAGIC, VERSION
from .run_storage import FileRunStorage

__all__ = ['BaseRunStorage', 'FileRunStorage', 'save_checkpoint', 'load_checkpoint', 'MAGIC', 'VERSION']
