"""Tests for compositing, mask combination, normalization and resampling."""

import pytest
import torch

from core.exceptions import ContractViolationError
from core.imaging import combine_masks, composite, cross_composite, downsample_mask, minmax_normalize


def _images(b=2, side=4, dtype=torch.float32, seed=0):
    g = torch.Generator().manual_seed(seed)
    fg = torch.rand(b, 3, side, side, generator=g, dtype=dtype) * 2 - 1
    bg = torch.rand(b, 3, side, side, generator=g, dtype=dtype) * 2 - 1
    mask = torch.rand(b, 1, side, side, generator=g, dtype=dtype)
    return fg, bg, mask


# ---------------------------------------------------------------------------
# composite
# ---------------------------------------------------------------------------

class TestComposite:
    def test_full_mask_returns_foreground(self):
        fg, bg, _ = _images()
        assert torch.equal(composite(fg, bg, torch.ones(2, 1, 4, 4)), fg)

    def test_empty_mask_returns_background(self):
        fg, bg, _ = _images()
        assert torch.equal(composite(fg, bg, torch.zeros(2, 1, 4, 4)), bg)

    def test_half_mask_is_average(self):
        fg, bg, _ = _images()
        out = composite(fg, bg, torch.full((2, 1, 4, 4), 0.5))
        assert torch.allclose(out, (fg + bg) / 2)

    def test_stays_in_image_range(self):
        fg, bg, mask = _images(b=8, side=8)
        out = composite(fg, bg, mask)
        assert out.min() >= -1 and out.max() <= 1

    def test_keeps_dtype(self):
        fg, bg, mask = _images(dtype=torch.float64)
        assert composite(fg, bg, mask).dtype == torch.float64

    def test_mask_size_mismatch_names_dims(self):
        fg, bg, _ = _images()
        with pytest.raises(ContractViolationError) as exc:
            composite(fg, bg, torch.ones(2, 1, 8, 8))
        assert exc.value.details['dims'] == ['height', 'width']

    def test_fg_bg_mismatch(self):
        fg, _, mask = _images()
        with pytest.raises(ContractViolationError):
            composite(fg, torch.zeros(2, 3, 4, 5), mask)

    def test_gradients_match_finite_differences(self):
        fg, bg, mask = _images(dtype=torch.float64)
        for t in (fg, bg, mask):
            t.requires_grad_(True)
        assert torch.autograd.gradcheck(composite, (fg, bg, mask))

    def test_affine_in_mask(self):
        fg, bg, m1 = _images(b=4, side=8, seed=4)
        _, _, m2 = _images(b=4, side=8, seed=5)
        for alpha in (0.0, 0.25, 0.6, 1.0):
            mixed = composite(fg, bg, alpha * m1 + (1 - alpha) * m2)
            blended = alpha * composite(fg, bg, m1) + (1 - alpha) * composite(fg, bg, m2)
            assert torch.allclose(mixed, blended, atol=1e-5)


# ---------------------------------------------------------------------------
# combine_masks / minmax_normalize
# ---------------------------------------------------------------------------

class TestCombineMasks:
    def test_gamma_zero_is_coarse(self):
        _, _, coarse = _images()
        fine = torch.rand_like(coarse)
        mask, contribution = combine_masks(coarse, fine, 0.0)
        assert torch.equal(mask, coarse)
        assert torch.count_nonzero(contribution) == 0

    def test_clipped_to_unit_interval(self):
        coarse = torch.full((1, 1, 4, 4), 0.8)
        fine = torch.full((1, 1, 4, 4), 0.6)
        mask, contribution = combine_masks(coarse, fine, 1.0)
        assert torch.allclose(mask, torch.ones_like(mask))
        assert torch.allclose(contribution, torch.full_like(mask, 0.2))

    def test_contribution_is_mask_minus_coarse(self):
        _, _, coarse = _images(seed=1)
        _, _, fine = _images(seed=2)
        mask, contribution = combine_masks(coarse, fine, 0.3)
        assert torch.allclose(contribution, mask - coarse)
        assert (contribution >= -1e-7).all()

    def test_monotone_in_gamma(self):
        _, _, coarse = _images(b=4, side=8, seed=6)
        _, _, fine = _images(b=4, side=8, seed=7)
        previous = None
        for step in range(11):
            mask, _ = combine_masks(coarse, fine, step / 10)
            assert mask.min() >= 0 and mask.max() <= 1
            if previous is not None:
                assert (mask >= previous).all()
            previous = mask

    def test_gamma_outside_unit_interval(self):
        _, _, coarse = _images()
        with pytest.raises(ContractViolationError):
            combine_masks(coarse, coarse, 1.5)

    def test_gradients_match_finite_differences(self):
        g = torch.Generator().manual_seed(3)
        # keep the sum away from the clip boundaries
        coarse = (torch.rand(1, 1, 4, 4, generator=g, dtype=torch.float64) * 0.4).requires_grad_(True)
        fine = (torch.rand(1, 1, 4, 4, generator=g, dtype=torch.float64) * 0.4).requires_grad_(True)
        assert torch.autograd.gradcheck(lambda c, f: combine_masks(c, f, 0.5), (coarse, fine))


class TestMinMaxNormalize:
    def test_range_per_sample(self):
        raw = torch.randn(3, 1, 8, 8) * torch.tensor([1.0, 10.0, 0.1])[:, None, None, None]
        out = minmax_normalize(raw)
        for sample in out:
            assert sample.min() == pytest.approx(0.0, abs=1e-6)
            assert sample.max() == pytest.approx(1.0, abs=1e-6)

    def test_constant_sample_maps_to_zero(self):
        out = minmax_normalize(torch.full((1, 1, 4, 4), 3.0))
        assert torch.count_nonzero(out) == 0

    def test_non_finite_input_rejected(self):
        raw = torch.zeros(1, 1, 4, 4)
        raw[0, 0, 0, 0] = float('nan')
        with pytest.raises(ContractViolationError) as exc:
            minmax_normalize(raw)
        assert exc.value.details['non_finite'] is True


# ---------------------------------------------------------------------------
# downsample_mask / cross_composite
# ---------------------------------------------------------------------------

class TestDownsampleMask:
    def test_same_size_is_identity(self):
        mask = torch.rand(2, 1, 16, 16)
        assert downsample_mask(mask, 16) is mask

    def test_constant_mask_stays_constant(self):
        out = downsample_mask(torch.full((1, 1, 64, 64), 0.25), 16)
        assert out.shape == (1, 1, 16, 16)
        assert torch.allclose(out, torch.full_like(out, 0.25))

    def test_block_mean_for_factor_two(self):
        mask = torch.zeros(1, 1, 4, 4)
        mask[..., :2, :2] = 1.0
        out = downsample_mask(mask, 2)
        assert out[0, 0, 0, 0] == pytest.approx(1.0)
        assert out[0, 0, 1, 1] == pytest.approx(0.0)

    def test_upsampling_rejected(self):
        with pytest.raises(ContractViolationError):
            downsample_mask(torch.rand(1, 1, 8, 8), 16)

    def test_non_divisor_rejected(self):
        with pytest.raises(ContractViolationError):
            downsample_mask(torch.rand(1, 1, 16, 16), 6)


class TestCrossComposite:
    def test_grid_shape(self):
        fg, _, masks = _images(b=3)
        bg = torch.rand(5, 3, 4, 4) * 2 - 1
        assert cross_composite(fg, masks, bg).shape == (3, 5, 3, 4, 4)

    def test_full_mask_row_is_foreground(self):
        fg, _, masks = _images(b=2)
        masks[0] = 1.0
        bg = torch.rand(3, 3, 4, 4) * 2 - 1
        grid = cross_composite(fg, masks, bg)
        for m in range(3):
            assert torch.equal(grid[0, m], fg[0])

    def test_empty_mask_column_is_background(self):
        fg, _, _ = _images(b=2)
        masks = torch.zeros(2, 1, 4, 4)
        bg = torch.rand(3, 3, 4, 4) * 2 - 1
        grid = cross_composite(fg, masks, bg)
        for n in range(2):
            for m in range(3):
                assert torch.equal(grid[n, m], bg[m])

    def test_cell_matches_composite(self):
        fg, _, masks = _images(b=2)
        bg = torch.rand(3, 3, 4, 4) * 2 - 1
        grid = cross_composite(fg, masks, bg)
        expected = composite(fg[1:2], bg[2:3], masks[1:2])[0]
        assert torch.allclose(grid[1, 2], expected)

    def test_background_size_mismatch(self):
        fg, _, masks = _images(b=2)
        with pytest.raises(ContractViolationError):
            cross_composite(fg, masks, torch.zeros(1, 3, 8, 8))
