"""Environment-aware runtime configuration."""

import os
import logging

import torch

logger = logging.getLogger(__name__)

_VALID_DEVICES = {"auto", "cpu", "cuda"}


def get_device_preference() -> str:
    """Return the device preference from FGSYNTH_DEVICE.

    FGSYNTH_DEVICE=cpu   → cpu
    FGSYNTH_DEVICE=cuda  → cuda
    FGSYNTH_DEVICE=*     → auto  (default)
    """
    preference = os.environ.get("FGSYNTH_DEVICE", "auto").lower()
    if preference not in _VALID_DEVICES:
        logger.warning("Invalid FGSYNTH_DEVICE=%r, falling back to 'auto'", preference)
        preference = "auto"
    return preference


def resolve_device(preference: str = "auto") -> torch.device:
    """Turn a device preference into a torch device.

    An explicit config value wins over the environment; ``auto`` picks CUDA
    when available.
    """
    if preference == "auto":
        preference = get_device_preference()
    if preference == "cuda" and not torch.cuda.is_available():
        logger.warning("CUDA requested but not available, using CPU")
        preference = "cpu"
    if preference == "auto":
        preference = "cuda" if torch.cuda.is_available() else "cpu"
    return torch.device(preference)


def get_runs_dir() -> str:
    """Return the parent directory for run directories (FGSYNTH_RUNS_DIR, default 'runs')."""
    return os.environ.get("FGSYNTH_RUNS_DIR") or "runs"


def slow_tests_enabled() -> bool:
    """Whether FGSYNTH_SLOW_TESTS asks for the desk-scale acceptance runs."""
    return os.environ.get("FGSYNTH_SLOW_TESTS", "").lower() in {"1", "true", "yes"}
