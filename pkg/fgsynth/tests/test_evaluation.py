"""Tests for the evaluation protocol and its report tables."""

import pytest
import torch

from core.exceptions import ContractViolationError, DatasetError
from core.embedders import RandomProjectionEmbedder
from services.evaluation_service import (
    MaskDirectoryGroundTruth,
    SampleBatch,
    build_ground_truth,
    evaluate_generator,
    evaluate_model,
    evaluate_oracle,
    generated_samples,
    oracle_samples,
)
from utils.image_io import save_mask
from visualization.report_table import COLUMNS, report_row, to_markdown, write_csv, write_markdown


class TestOracleEvaluation:
    def test_stored_mattes_score_perfectly(self):
        report = evaluate_oracle(20, 32, seed=1)
        assert report.segmentation.miou == 1.0
        assert report.segmentation.f1 == 1.0
        assert report.gt_source == 'oracle'
        assert report.frechet is None

    def test_palette_rule_agrees_with_mattes(self):
        report = evaluate_oracle(20, 32, seed=1, gt_source='palette')
        assert report.segmentation.miou > 0.9

    def test_macro_averaging(self):
        assert evaluate_oracle(10, 16, averaging='macro').averaging == 'macro'


class TestEvaluateModel:
    def test_sample_count_mismatch(self):
        with pytest.raises(DatasetError):
            evaluate_model(oracle_samples(4, 16), build_ground_truth('oracle', 16), n_samples=5)

    def test_frechet_against_itself_is_small(self):
        embedder = RandomProjectionEmbedder(dim=8)
        reference = [b.images for b in oracle_samples(40, 16, seed=2, batch_size=20)]
        report = evaluate_model(oracle_samples(40, 16, seed=2, batch_size=20), build_ground_truth('oracle', 16),
                                n_samples=40, embedder=embedder, reference_batches=reference)
        assert report.frechet == pytest.approx(0.0, abs=1e-6)

    def test_mask_directory_count_must_match(self, tmp_path):
        for i in range(3):
            save_mask(torch.ones(1, 16, 16), tmp_path / f'{i:03d}.png')
        ground_truth = MaskDirectoryGroundTruth(tmp_path, 16)
        with pytest.raises(DatasetError):
            evaluate_model(oracle_samples(4, 16), ground_truth, n_samples=4)

    def test_mask_directory_is_read_in_order(self, tmp_path):
        for i in range(4):
            save_mask(torch.full((1, 16, 16), float(i % 2)), tmp_path / f'{i:03d}.png')
        masks = torch.zeros(4, 1, 16, 16)
        masks[1::2] = 1.0
        batches = [SampleBatch(images=torch.zeros(2, 3, 16, 16), masks=masks[i:i + 2], start=i)
                   for i in (0, 2)]
        report = evaluate_model(batches, MaskDirectoryGroundTruth(tmp_path, 16), n_samples=4)
        assert report.segmentation.miou == 1.0

    def test_unknown_ground_truth(self):
        with pytest.raises(ContractViolationError):
            build_ground_truth('crowd', 16)


class TestEvaluateGenerator:
    def test_generated_foregrounds(self, tiny_generator):
        batches = list(generated_samples(tiny_generator.eval(), 5, batch_size=2))
        assert [len(b) for b in batches] == [2, 2, 1]
        assert batches[0].masks.shape == (2, 1, 16, 16)

    def test_report_is_tagged(self, tiny_generator, tiny_config):
        tiny_generator.eval().requires_grad_(False)
        report = evaluate_generator(tiny_generator, tiny_config, n_samples=8, psi=0.7, threshold=0.4,
                                    batch_size=4)
        assert report.psi == 0.7
        assert report.threshold == 0.4
        assert report.n_samples == 8
        assert report.gt_source == 'palette'
        assert report.frechet is not None and report.frechet >= 0
        for value in report.segmentation.to_dict().values():
            assert 0.0 <= value <= 1.0


class TestReportTable:
    def test_row_columns(self):
        row = report_row(evaluate_oracle(4, 16), 'oracle')
        assert tuple(row) == COLUMNS
        assert row['Setting'] == 'oracle'
        assert row['FD'] == ''

    def test_csv_and_markdown(self, tmp_path):
        reports = [evaluate_oracle(4, 16), evaluate_oracle(4, 16, threshold=0.3)]
        csv_path = write_csv(reports, tmp_path / 'report.csv', settings=['a', 'b'])
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0].split(',') == list(COLUMNS)
        assert len(lines) == 3
        assert lines[2].startswith('b,')
        markdown = to_markdown(reports, ['a', 'b'])
        assert markdown.splitlines()[0].startswith('| Setting |')
        assert len(markdown.splitlines()) == 4
        assert write_markdown(reports, tmp_path / 'report.md', ['a', 'b']).read_text() == markdown
