"""Tests for the loss suite: closed-form values, gradients and totals."""

import math

import pytest
import torch

from core.exceptions import ContractViolationError
from core.imaging import composite
from core.losses import (
    adversarial_losses,
    background_participation_loss,
    binarization_loss,
    coarse_area_loss,
    fine_area_loss,
    generator_adversarial_loss,
    mask_consistency_loss,
    mask_prediction_loss,
    total_discriminator_loss,
    total_generator_loss,
)
from core.models.loss_report import LossCoefficients, LossReport

LN2 = math.log(2.0)


def _full(value, shape=(2, 1, 4, 4), dtype=torch.float32):
    return torch.full(shape, value, dtype=dtype)


def _rand(shape, seed, dtype=torch.float64, low=0.0, high=1.0):
    g = torch.Generator().manual_seed(seed)
    return (torch.rand(shape, generator=g, dtype=dtype) * (high - low) + low).requires_grad_(True)


def _finite_difference(fn, x, eps=1e-6):
    """Central differences of scalar ``fn`` at every entry of ``x``."""
    grad = torch.zeros_like(x)
    flat = x.detach().clone().reshape(-1)
    for i in range(flat.numel()):
        plus, minus = flat.clone(), flat.clone()
        plus[i] += eps
        minus[i] -= eps
        grad.reshape(-1)[i] = (fn(plus.reshape(x.shape)) - fn(minus.reshape(x.shape))) / (2 * eps)
    return grad


def _assert_gradient(fn, x, rtol=1e-3):
    x = x.detach().clone().requires_grad_(True)
    analytic, = torch.autograd.grad(fn(x), x)
    numeric = _finite_difference(lambda v: fn(v).detach(), x.detach())
    scale = numeric.abs().max().clamp(min=1e-8)
    assert ((analytic - numeric).abs().max() / scale) < rtol


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

class TestAdversarial:
    def test_zero_logits(self):
        loss_d, loss_g = adversarial_losses(torch.zeros(4), torch.zeros(4))
        assert loss_d.item() == pytest.approx(2 * LN2, abs=1e-6)
        assert loss_g.item() == pytest.approx(LN2, abs=1e-6)

    def test_generator_term_alone(self):
        assert generator_adversarial_loss(torch.zeros(8)).item() == pytest.approx(LN2, abs=1e-6)

    def test_confident_discriminator(self):
        loss_d, loss_g = adversarial_losses(torch.full((4,), 20.0), torch.full((4,), -20.0))
        assert loss_d.item() == pytest.approx(0.0, abs=1e-6)
        assert loss_g.item() == pytest.approx(20.0, abs=1e-6)


class TestMaskTerms:
    def test_prediction_mse_after_downsampling(self):
        loss = mask_prediction_loss(_full(1.0, (2, 1, 32, 32)), _full(0.5, (2, 1, 16, 16)))
        assert loss.item() == pytest.approx(0.25, abs=1e-6)

    def test_prediction_constant_gap(self):
        loss = mask_prediction_loss(_full(0.3, (2, 1, 64, 64)), _full(0.5, (2, 1, 16, 16)))
        assert loss.item() == pytest.approx(0.04, abs=1e-6)

    def test_prediction_exact_match(self):
        mask = _full(0.3, (2, 1, 64, 64))
        assert mask_prediction_loss(mask, _full(0.3, (2, 1, 16, 16))).item() == pytest.approx(0.0, abs=1e-6)

    def test_consistency_constant(self):
        def predictor(x):
            return _full(0.2, (x.shape[0], 1, 16, 16))
        loss = mask_consistency_loss(torch.zeros(2, 3, 16, 16), _full(0.7, (2, 1, 16, 16)), predictor)
        assert loss.item() == pytest.approx(0.25, abs=1e-6)

    def test_consistency_stops_gradient_through_foreground(self):
        weight = torch.randn(3, dtype=torch.float64)

        def predictor(x):
            return torch.sigmoid((x * weight[None, :, None, None]).sum(dim=1, keepdim=True))

        x_fg = _rand((2, 3, 4, 4), 0)
        x_comp = _rand((2, 3, 4, 4), 1)
        loss = mask_consistency_loss(x_fg, predictor(x_comp), predictor)
        grad_fg, grad_comp = torch.autograd.grad(loss, (x_fg, x_comp), allow_unused=True)
        assert grad_fg is None or torch.count_nonzero(grad_fg) == 0
        assert torch.count_nonzero(grad_comp) > 0

    def test_binarization_values(self):
        assert binarization_loss(_full(0.3)).item() == pytest.approx(0.3, abs=1e-6)
        assert binarization_loss(_full(0.8)).item() == pytest.approx(0.2, abs=1e-6)
        assert binarization_loss(_full(1.0)).item() == pytest.approx(0.0, abs=1e-6)
        assert binarization_loss(_full(0.5)).item() == pytest.approx(0.5, abs=1e-6)

    def test_binarization_mixed_halves(self):
        coarse = torch.cat([_full(0.2, (1, 1, 4, 4)), _full(0.9, (1, 1, 4, 4))])
        assert binarization_loss(coarse).item() == pytest.approx(0.15, abs=1e-6)

    def test_coarse_area_hinge(self):
        assert coarse_area_loss(_full(0.2), 0.35).item() == pytest.approx(0.15, abs=1e-6)
        assert coarse_area_loss(_full(0.5), 0.35).item() == pytest.approx(0.0, abs=1e-6)
        assert coarse_area_loss(_full(0.35, dtype=torch.float64), 0.35).item() == pytest.approx(0.0, abs=1e-6)

    def test_coarse_area_scope(self):
        coarse = torch.cat([_full(0.0, (1, 1, 4, 4)), _full(0.6, (1, 1, 4, 4))])
        # per sample: (0.35 + 0) / 2; batch: mean 0.3 -> 0.05
        assert coarse_area_loss(coarse, 0.35, 'sample').item() == pytest.approx(0.175, abs=1e-6)
        assert coarse_area_loss(coarse, 0.35, 'batch').item() == pytest.approx(0.05, abs=1e-6)

    def test_fine_area_printed(self):
        assert fine_area_loss(_full(1.0), 0.01).item() == pytest.approx(0.01, abs=1e-6)
        assert fine_area_loss(_full(0.0), 0.01).item() == pytest.approx(0.0, abs=1e-6)
        assert fine_area_loss(_full(0.995), 0.01).item() == pytest.approx(0.005, abs=1e-6)

    def test_fine_area_contribution_mode(self):
        assert fine_area_loss(_full(0.05), 0.01, mode='contribution').item() == pytest.approx(0.04, abs=1e-6)
        assert fine_area_loss(_full(0.005), 0.01, mode='contribution').item() == pytest.approx(0.0, abs=1e-6)

    def test_background_participation(self):
        loss = background_participation_loss(_full(1.0, (2, 3, 4, 4)), _full(0.0, (2, 3, 4, 4)))
        assert loss.item() == pytest.approx(1.0, abs=1e-6)

    def test_background_participation_full_mask(self):
        x_comp = composite(_full(1.0, (2, 3, 4, 4)), _full(-1.0, (2, 3, 4, 4)), _full(1.0))
        assert background_participation_loss(x_comp, _full(-1.0, (2, 3, 4, 4))).item() == pytest.approx(4.0, abs=1e-6)

    def test_background_participation_is_masked_difference(self):
        for seed in range(5):
            fg = _rand((2, 3, 8, 8), seed, low=-1, high=1).detach()
            bg = _rand((2, 3, 8, 8), seed + 10, low=-1, high=1).detach()
            mask = _rand((2, 1, 8, 8), seed + 20).detach()
            loss = background_participation_loss(composite(fg, bg, mask), bg)
            expected = (mask * (fg - bg)).square().mean()
            assert loss.item() == pytest.approx(expected.item(), abs=1e-6)

    def test_threshold_outside_interval(self):
        with pytest.raises(ContractViolationError):
            coarse_area_loss(_full(0.5), 1.2)
        with pytest.raises(ContractViolationError):
            fine_area_loss(_full(0.5), 0.0)

    def test_unknown_modes(self):
        with pytest.raises(ContractViolationError):
            fine_area_loss(_full(0.5), 0.01, mode='area')
        with pytest.raises(ContractViolationError):
            coarse_area_loss(_full(0.5), 0.35, scope='image')


# ---------------------------------------------------------------------------
# Gradients
# ---------------------------------------------------------------------------

class TestGradients:
    def test_adversarial(self):
        real = _rand((4,), 0, low=-2, high=2)
        _assert_gradient(lambda f: adversarial_losses(real.detach(), f)[0], _rand((4,), 1, low=-2, high=2))
        _assert_gradient(generator_adversarial_loss, _rand((4,), 2, low=-2, high=2))

    def test_prediction(self):
        mask = _rand((2, 1, 32, 32), 3).detach()
        _assert_gradient(lambda p: mask_prediction_loss(mask, p), _rand((2, 1, 16, 16), 4))

    def test_consistency(self):
        x_fg = _rand((2, 3, 4, 4), 5).detach()

        def predictor(x):
            return torch.sigmoid(x.sum(dim=1, keepdim=True))

        _assert_gradient(lambda p: mask_consistency_loss(x_fg, p, predictor), _rand((2, 1, 4, 4), 6))

    def test_binarization(self):
        # keep away from the kink at 0.5
        _assert_gradient(binarization_loss, _rand((2, 1, 4, 4), 7, low=0.05, high=0.45))

    def test_coarse_area(self):
        _assert_gradient(lambda m: coarse_area_loss(m, 0.9), _rand((2, 1, 4, 4), 8, low=0.0, high=0.5))

    def test_fine_area(self):
        _assert_gradient(lambda m: fine_area_loss(m, 0.2), _rand((2, 1, 4, 4), 9, low=0.9, high=1.0))
        _assert_gradient(lambda m: fine_area_loss(m, 0.01, mode='contribution'),
                         _rand((2, 1, 4, 4), 10, low=0.1, high=0.3))

    def test_inactive_hinges_have_zero_gradient(self):
        cases = [
            (lambda m: coarse_area_loss(m, 0.35), 0.5),
            (lambda m: fine_area_loss(m, 0.01), 0.5),
            (lambda m: fine_area_loss(m, 0.01, mode='contribution'), 0.005),
        ]
        for fn, value in cases:
            mask = _full(value, dtype=torch.float64).requires_grad_(True)
            grad, = torch.autograd.grad(fn(mask), mask)
            assert torch.count_nonzero(grad) == 0

    def test_background_participation(self):
        bg = _rand((2, 3, 4, 4), 11).detach()
        _assert_gradient(lambda c: background_participation_loss(c, bg), _rand((2, 3, 4, 4), 12))

    def test_gradcheck_composite_losses(self):
        bg = _rand((1, 3, 4, 4), 13).detach()
        assert torch.autograd.gradcheck(lambda c: background_participation_loss(c, bg), (_rand((1, 3, 4, 4), 14),))


# ---------------------------------------------------------------------------
# Totals
# ---------------------------------------------------------------------------

def _report(**flags):
    report = LossReport(coefficients=LossCoefficients(lambda_coarse=5.0, lambda_fine=5.0, c_bin=0.5,
                                                      r1_weight=16.0), **flags)
    for name, value in {'adv_g': 1.0, 'consistency': 0.1, 'binary': 0.2, 'area_coarse': 0.05,
                        'area_fine': 0.01, 'bg_participation': 0.3, 'adv_d': 1.5, 'r1': 0.02,
                        'pred': 0.04}.items():
        report[name] = torch.tensor(value)
    return report


class TestTotals:
    def test_generator_total_without_gated_terms(self):
        total = total_generator_loss(_report())
        assert total.item() == pytest.approx(1.0 + 5 * (0.5 * 0.2 + 0.05) + 5 * 0.01, abs=1e-6)

    def test_generator_total_with_gated_terms(self):
        total = total_generator_loss(_report(consistency_active=True, bg_participation_active=True))
        assert total.item() == pytest.approx(1.0 + 0.75 + 0.05 + 0.1 + 0.3, abs=1e-6)

    def test_discriminator_total_lazy_r1(self):
        assert total_discriminator_loss(_report()).item() == pytest.approx(1.54, abs=1e-6)
        assert total_discriminator_loss(_report(r1_active=True)).item() == pytest.approx(1.54 + 0.32, abs=1e-6)

    def test_missing_part(self):
        report = LossReport()
        report['adv_d'] = torch.tensor(1.0)
        with pytest.raises(ContractViolationError):
            total_discriminator_loss(report)

    def test_unknown_part_name(self):
        with pytest.raises(ContractViolationError):
            LossReport()['perceptual'] = torch.tensor(0.0)

    def test_report_dict_round_trip(self):
        report = _report(r1_active=True)
        restored = LossReport.from_dict(report.to_dict())
        assert restored.to_dict() == report.to_dict()

    def test_first_non_finite(self):
        report = _report()
        report['pred'] = torch.tensor(float('nan'))
        assert report.first_non_finite() == 'pred'
