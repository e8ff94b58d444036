"""Tests for the critic, its mask predictor and the R1 penalty."""

import pytest
import torch

from core.exceptions import ContractViolationError
from discriminator.critic import PREDICTOR_SIDE, Discriminator, r1_penalty


class TestDiscriminator:
    def test_output_shapes(self, tiny_discriminator):
        out = tiny_discriminator(torch.rand(4, 3, 16, 16) * 2 - 1)
        assert out.logits.shape == (4,)
        assert out.predicted_mask.shape == (4, 1, PREDICTOR_SIDE, PREDICTOR_SIDE)
        assert out.predicted_mask.min() >= 0 and out.predicted_mask.max() <= 1

    def test_predictor_taps_16x16_at_higher_resolution(self):
        torch.manual_seed(0)
        critic = Discriminator(64, channel_base=256, channel_max=32)
        out = critic(torch.rand(2, 3, 64, 64) * 2 - 1)
        assert out.features.shape[-1] == PREDICTOR_SIDE
        assert out.predicted_mask.shape == (2, 1, 16, 16)

    def test_predict_mask_matches_forward(self, tiny_discriminator):
        x = torch.rand(4, 3, 16, 16) * 2 - 1
        assert torch.allclose(tiny_discriminator.predict_mask(x), tiny_discriminator(x).predicted_mask)

    def test_odd_batch_minibatch_stddev(self, tiny_discriminator):
        out = tiny_discriminator(torch.rand(3, 3, 16, 16))
        assert out.logits.shape == (3,)

    def test_detached_trunk_blocks_prediction_gradient(self, tiny_discriminator):
        x = torch.rand(2, 3, 16, 16)
        out = tiny_discriminator(x, detach_mask_trunk=True)
        out.predicted_mask.mean().backward()
        trunk_grads = [p.grad for p in tiny_discriminator.from_rgb.parameters()]
        assert all(g is None for g in trunk_grads)
        assert any(p.grad is not None for p in tiny_discriminator.mask_predictor.parameters())

    def test_prediction_gradient_reaches_trunk_by_default(self, tiny_discriminator):
        out = tiny_discriminator(torch.rand(2, 3, 16, 16))
        out.predicted_mask.mean().backward()
        trunk_grads = [p.grad for p in tiny_discriminator.from_rgb.parameters()]
        assert all(g is not None and torch.count_nonzero(g) > 0 for g in trunk_grads)

    def test_predictor_is_small(self, tiny_discriminator):
        assert tiny_discriminator.predictor_parameter_count() < tiny_discriminator.critic_parameter_count()

    def test_wrong_input_size(self, tiny_discriminator):
        with pytest.raises(ContractViolationError):
            tiny_discriminator(torch.rand(2, 3, 32, 32))

    def test_resolution_must_reach_tap(self):
        with pytest.raises(ContractViolationError):
            Discriminator(8)


class TestR1Penalty:
    def test_non_negative_and_scaled_by_gamma(self, tiny_discriminator):
        x = torch.rand(4, 3, 16, 16) * 2 - 1
        base = r1_penalty(tiny_discriminator, x, 1.0)
        assert base.item() >= 0
        assert r1_penalty(tiny_discriminator, x, 10.0).item() == pytest.approx(10 * base.item(), rel=1e-5)

    def test_backpropagates_to_critic(self, tiny_discriminator):
        r1_penalty(tiny_discriminator, torch.rand(4, 3, 16, 16), 1.0).backward()
        assert any(p.grad is not None and p.grad.abs().sum() > 0 for p in tiny_discriminator.parameters())

    def test_zero_for_input_independent_critic(self, tiny_discriminator):
        with torch.no_grad():
            tiny_discriminator.out.weight.weight.zero_()
        assert r1_penalty(tiny_discriminator, torch.rand(4, 3, 16, 16), 10.0).item() == 0.0

    def test_default_gamma_scales_with_pixels(self, tiny_config):
        assert tiny_config.replace(resolution=256).effective_r1_gamma == pytest.approx(10.0)
        assert tiny_config.replace(resolution=64).effective_r1_gamma == pytest.approx(10.0 / 16)
