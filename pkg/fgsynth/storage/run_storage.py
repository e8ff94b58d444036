"""File-backed run directory.

Layout::

    <run>/manifest.json
    <run>/config.toml
    <run>/metrics.jsonl
    <run>/checkpoints/ckpt-NNNNNNN.pt, latest.pt
    <run>/grids/*.png
"""

import json
import logging
import threading
from pathlib import Path
from typing import Any, Dict, List, Optional

import tomli_w

from storage.base_storage import BaseRunStorage
from storage.checkpoint_store import save_checkpoint

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

logger = logging.getLogger(__name__)


class FileRunStorage(BaseRunStorage):
    """Run directory on the local filesystem."""

    def __init__(self, run_dir):
        """Initialize run storage.

        Args:
            run_dir: Directory of this run (created if missing)
        """
        self.run_dir = Path(run_dir)
        self.checkpoint_dir = self.run_dir / 'checkpoints'
        self.grid_dir = self.run_dir / 'grids'
        for directory in (self.run_dir, self.checkpoint_dir, self.grid_dir):
            directory.mkdir(parents=True, exist_ok=True)
        self.metrics_path = self.run_dir / 'metrics.jsonl'
        self.config_path = self.run_dir / 'config.toml'
        self.manifest_path = self.run_dir / 'manifest.json'
        self._lock = threading.Lock()

    def write_manifest(self, manifest: Dict[str, Any]) -> None:
        self.manifest_path.write_text(json.dumps(manifest, indent=2, default=str))

    def write_config(self, config: Dict[str, Any]) -> None:
        # TOML has no null; unset optional keys are left out
        self.config_path.write_text(tomli_w.dumps({k: v for k, v in config.items() if v is not None}))

    def read_config(self) -> Optional[Dict[str, Any]]:
        if not self.config_path.is_file():
            return None
        with open(self.config_path, 'rb') as f:
            return tomllib.load(f)

    def append_metrics(self, record: Dict[str, Any]) -> None:
        line = json.dumps(record)
        with self._lock, open(self.metrics_path, 'a') as f:
            f.write(line + '\n')

    def read_metrics(self) -> List[Dict[str, Any]]:
        if not self.metrics_path.is_file():
            return []
        with open(self.metrics_path) as f:
            return [json.loads(line) for line in f if line.strip()]

    def save_checkpoint(self, payload: Dict[str, Any], iteration: int) -> Path:
        path = save_checkpoint(self.checkpoint_dir / f'ckpt-{iteration:07d}.pt', payload)
        save_checkpoint(self.checkpoint_dir / 'latest.pt', payload)
        logger.info(f"Checkpoint saved at iteration {iteration}: {path}")
        return path

    def latest_checkpoint(self) -> Optional[Path]:
        latest = self.checkpoint_dir / 'latest.pt'
        return latest if latest.is_file() else None

    def grid_path(self, name: str) -> Path:
        return self.grid_dir / f'{name}.png'
