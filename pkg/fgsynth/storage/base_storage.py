"""Abstract base class for run storage backends."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional


class BaseRunStorage(ABC):
    """Abstract base class for everything a training run persists."""

    @abstractmethod
    def write_manifest(self, manifest: Dict[str, Any]) -> None:
        """Save the run manifest."""
        pass

    @abstractmethod
    def write_config(self, config: Dict[str, Any]) -> None:
        """Save the frozen effective configuration."""
        pass

    @abstractmethod
    def read_config(self) -> Optional[Dict[str, Any]]:
        """Load the frozen configuration, if any."""
        pass

    @abstractmethod
    def append_metrics(self, record: Dict[str, Any]) -> None:
        """Append one record to the metrics log."""
        pass

    @abstractmethod
    def read_metrics(self) -> List[Dict[str, Any]]:
        """Load all metrics records in order."""
        pass

    @abstractmethod
    def save_checkpoint(self, payload: Dict[str, Any], iteration: int) -> Path:
        """Save a checkpoint for ``iteration`` and return its location."""
        pass

    @abstractmethod
    def latest_checkpoint(self) -> Optional[Path]:
        """Location of the most recent checkpoint, if any."""
        pass

    @abstractmethod
    def grid_path(self, name: str) -> Path:
        """Where an image grid called ``name`` should be written."""
        pass
