"""Tests for TOML configuration loading, validation and resume checks."""

import pytest

from core.exceptions import ConfigError, ResourceNotFoundError
from core.models.train_config import TrainConfig
from schemas.config_schemas import TrainConfigSchema
from utils.config_loader import check_resume_compatible, load_train_config, parse_overrides, read_toml
from utils.validation import validate_data


def _write(tmp_path, text, name='run.toml'):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestTrainConfigSchema:
    def test_defaults(self):
        config = validate_data(TrainConfigSchema, {})
        assert config == TrainConfig()
        assert config.effective_r1_gamma == pytest.approx(10.0 / 16)

    def test_unknown_key_is_named(self):
        with pytest.raises(ConfigError) as exc:
            validate_data(TrainConfigSchema, {'bogus_key': 1})
        assert 'bogus_key' in exc.value.message
        assert 'bogus_key' in exc.value.details

    def test_odd_batch_rejected(self):
        with pytest.raises(ConfigError) as exc:
            validate_data(TrainConfigSchema, {'batch_size': 15})
        assert 'batch_size' in exc.value.details

    @pytest.mark.parametrize('resolution', [8, 48, 100])
    def test_resolution_power_of_two(self, resolution):
        with pytest.raises(ConfigError):
            validate_data(TrainConfigSchema, {'resolution': resolution})

    def test_folder_data_needs_path(self):
        with pytest.raises(ConfigError) as exc:
            validate_data(TrainConfigSchema, {'data_source': 'folder'})
        assert 'data_path' in exc.value.details

    def test_monitor_band_ordered(self):
        with pytest.raises(ConfigError):
            validate_data(TrainConfigSchema, {'monitor_low': 0.9, 'monitor_high': 0.1})

    def test_dataset_kind_needs_unaligned(self):
        with pytest.raises(ConfigError):
            validate_data(TrainConfigSchema, {'dataset_kind': 'cub'})

    def test_unaligned_preset(self):
        config = validate_data(TrainConfigSchema, {'unaligned': True, 'dataset_kind': 'cub',
                                                   'schedule_iterations': 100})
        assert config.c_bin_end == 2.0
        assert config.phi1 == pytest.approx(0.1)
        assert config.area_scope == 'batch'
        assert config.center_crop is True
        assert config.consistency_start == 100

    def test_lsun_object_phi(self):
        config = validate_data(TrainConfigSchema, {'unaligned': True, 'dataset_kind': 'lsun_object'})
        assert config.phi1 == pytest.approx(0.2)


class TestConfigLoader:
    def test_file_then_overrides(self, tmp_path):
        path = _write(tmp_path, 'resolution = 32\nbatch_size = 8\nrun_name = "demo"\n')
        config = load_train_config(path, {'batch_size': '4', 'dual_fake': 'false'})
        assert config.resolution == 32
        assert config.batch_size == 4
        assert config.dual_fake is False
        assert config.run_name == 'demo'

    def test_none_override_ignored(self, tmp_path):
        path = _write(tmp_path, 'seed = 5\n')
        assert load_train_config(path, {'seed': None}).seed == 5

    def test_tables_rejected(self, tmp_path):
        path = _write(tmp_path, '[optim]\nlr_g = 0.001\n')
        with pytest.raises(ConfigError) as exc:
            read_toml(path)
        assert 'optim' in exc.value.details

    def test_malformed_toml(self, tmp_path):
        with pytest.raises(ConfigError):
            read_toml(_write(tmp_path, 'resolution = = 3\n'))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ResourceNotFoundError):
            load_train_config(tmp_path / 'absent.toml')

    def test_parse_overrides(self):
        assert parse_overrides(['phi1=0.3', ' seed = 2 ']) == {'phi1': '0.3', 'seed': '2'}
        with pytest.raises(ConfigError):
            parse_overrides(['phi1'])

    def test_shipped_configs_load(self):
        from pathlib import Path
        configs = Path(__file__).resolve().parents[2] / 'configs'
        oracle = load_train_config(configs / 'oracle64.toml')
        assert oracle.resolution == 64 and oracle.data_source == 'oracle'
        cub = load_train_config(configs / 'cub_unaligned.toml')
        assert cub.unaligned and cub.c_bin_end == 2.0


class TestResumeCompatibility:
    def test_matching_architecture_passes(self, tiny_config):
        check_resume_compatible(tiny_config, tiny_config.replace(lr_g=0.1, seed=9).to_dict())

    def test_mismatch_names_keys(self, tiny_config):
        saved = tiny_config.replace(resolution=32, mapping_depth=3).to_dict()
        with pytest.raises(ConfigError) as exc:
            check_resume_compatible(tiny_config, saved)
        assert set(exc.value.details) == {'resolution', 'mapping_depth'}
