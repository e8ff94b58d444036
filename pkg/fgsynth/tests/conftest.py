"""Shared pytest fixtures: tiny networks, a seeded trainer and oracle batches."""

import os
import sys

import pytest
import torch

# Add fgsynth/ to sys.path so bare imports (from core..., from services...) work
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from core.models.train_config import TrainConfig  # noqa: E402
from data.oracle_dataset import render_oracle_sample  # noqa: E402
from discriminator.critic import Discriminator  # noqa: E402
from generators.layered_generator import LayeredGenerator  # noqa: E402
from services.training_service import TrainingService  # noqa: E402
from storage.run_storage import FileRunStorage  # noqa: E402

TINY = dict(
    seed=0,
    device='cpu',
    resolution=16,
    reference_latent_dim=16,
    channel_base=256,
    channel_max=32,
    mapping_depth=2,
    mask_head_channels=8,
    batch_size=4,
    total_iterations=4,
    schedule_iterations=10,
    r1_interval=2,
    oracle_size=32,
    monitor_window=3,
    log_every=1,
    checkpoint_every=2,
    grid_every=2,
    truncation_samples=64,
)


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: desk-scale acceptance runs (FGSYNTH_SLOW_TESTS=1)')


@pytest.fixture
def tiny_config():
    return TrainConfig(**TINY)


@pytest.fixture
def tiny_generator(tiny_config):
    torch.manual_seed(0)
    return LayeredGenerator(tiny_config.generator_config())


@pytest.fixture
def tiny_discriminator(tiny_config):
    torch.manual_seed(0)
    return Discriminator(tiny_config.resolution, tiny_config.channel_base, tiny_config.channel_max)


@pytest.fixture
def trainer(tiny_config):
    return TrainingService(tiny_config, device=torch.device('cpu'), show_progress=False)


@pytest.fixture
def real_batch(tiny_config):
    """Four oracle images at the tiny resolution."""
    return torch.stack([render_oracle_sample(0, i, tiny_config.resolution).image for i in range(4)])


@pytest.fixture
def run_storage(tmp_path):
    return FileRunStorage(tmp_path / 'run')


@pytest.fixture
def seeded():
    torch.manual_seed(1234)
    return torch.Generator().manual_seed(1234)
