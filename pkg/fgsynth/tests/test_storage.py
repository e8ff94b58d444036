"""Tests for the checkpoint container and run directories."""

import pytest
import torch

from core.exceptions import CheckpointError, ResourceNotFoundError
from services.checkpoint_service import load_generator
from storage.checkpoint_store import MAGIC, VERSION, load_checkpoint, save_checkpoint
from storage.run_storage import FileRunStorage


def _payload(**extra):
    payload = {'config': {'resolution': 16}, 'iteration': 3, 'generator': {}, 'discriminator': {},
               'generator_ema': {}}
    payload.update(extra)
    return payload


class TestCheckpointStore:
    def test_round_trip(self, tmp_path):
        path = save_checkpoint(tmp_path / 'c.pt', _payload(extra=torch.arange(3)))
        loaded = load_checkpoint(path)
        assert loaded['magic'] == MAGIC and loaded['version'] == VERSION
        assert loaded['iteration'] == 3
        assert torch.equal(loaded['extra'], torch.arange(3))
        assert not (tmp_path / 'c.pt.tmp').exists()

    def test_missing_file(self, tmp_path):
        with pytest.raises(ResourceNotFoundError):
            load_checkpoint(tmp_path / 'absent.pt')

    def test_garbage_file(self, tmp_path):
        path = tmp_path / 'garbage.pt'
        path.write_bytes(b'\x00not a checkpoint')
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / 'other.pt'
        torch.save({'magic': 'SOMETHING-ELSE', 'version': 1}, path)
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_newer_version(self, tmp_path):
        path = tmp_path / 'future.pt'
        torch.save({**_payload(), 'magic': MAGIC, 'version': VERSION + 1}, path)
        with pytest.raises(CheckpointError) as exc:
            load_checkpoint(path)
        assert exc.value.details['version'] == VERSION + 1

    def test_missing_keys(self, tmp_path):
        path = tmp_path / 'partial.pt'
        torch.save({'magic': MAGIC, 'version': VERSION, 'config': {}}, path)
        with pytest.raises(CheckpointError) as exc:
            load_checkpoint(path)
        assert 'generator' in exc.value.details['missing']


class TestFileRunStorage:
    def test_layout(self, run_storage):
        assert run_storage.checkpoint_dir.is_dir()
        assert run_storage.grid_dir.is_dir()
        assert run_storage.latest_checkpoint() is None
        assert run_storage.read_metrics() == []
        assert run_storage.read_config() is None

    def test_config_round_trip_drops_none(self, run_storage, tiny_config):
        run_storage.write_config(tiny_config.to_dict())
        saved = run_storage.read_config()
        assert 'r1_gamma' not in saved
        assert saved['resolution'] == 16
        assert saved['batch_size'] == 4

    def test_metrics_are_appended(self, run_storage):
        run_storage.append_metrics({'iteration': 0})
        run_storage.append_metrics({'iteration': 1})
        assert run_storage.read_metrics() == [{'iteration': 0}, {'iteration': 1}]

    def test_checkpoint_writes_numbered_and_latest(self, run_storage):
        path = run_storage.save_checkpoint(_payload(), 12)
        assert path.name == 'ckpt-0000012.pt'
        assert run_storage.latest_checkpoint().name == 'latest.pt'

    def test_manifest(self, run_storage):
        run_storage.write_manifest({'seed': 0, 'path': run_storage.run_dir})
        assert '"seed": 0' in run_storage.manifest_path.read_text()


class TestLoadGenerator:
    def test_ema_generator_in_eval_mode(self, trainer, tmp_path):
        state = trainer.create_state()
        path = save_checkpoint(tmp_path / 'g.pt', trainer.checkpoint_payload(state))
        generator, config = load_generator(path, torch.device('cpu'))
        assert config == trainer.config
        assert not generator.training
        assert not any(p.requires_grad for p in generator.parameters())
        assert bool(generator.foreground.w_avg_ready)
        for key, value in state.generator_ema.state_dict().items():
            assert torch.equal(generator.state_dict()[key], value)

    def test_live_generator(self, trainer, tmp_path):
        state = trainer.create_state()
        path = save_checkpoint(tmp_path / 'g.pt', trainer.checkpoint_payload(state))
        generator, _ = load_generator(path, torch.device('cpu'), use_ema=False)
        assert not bool(generator.foreground.w_avg_ready)
