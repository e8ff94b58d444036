"""Adversarial training of the layered generator.

One step is a discriminator update followed by a generator update. The
discriminator's fake input is split evenly: the first half holds pure
foreground images, the second half composites of foreground, background and
mask. Schedules, gating and the lazy R1 penalty are driven by the iteration
counter kept in TrainState.
"""

import copy
import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Protocol, Tuple

import psutil
import torch
from tqdm import tqdm

from core.exceptions import ContractViolationError, TrainingAbortedError
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
from core.models.dataset_spec import DatasetSpec
from core.models.latent import LatentCode
from core.models.loss_report import LossCoefficients, LossReport
from core.models.mask_bundle import MaskBundle
from core.models.train_config import TrainConfig
from core.models.train_state import TrainState
from core.schedules import (
    binarization_coefficient,
    consistency_active,
    ema_beta,
    fine_mask_gamma,
    lazy_regularization_ratio,
    r1_active,
    regularization_active,
)
from data.folder_dataset import batch_stream, build_dataset
from discriminator.critic import Discriminator, r1_penalty
from generators.layered_generator import LayeredGenerator
from services.degeneration_monitor import DegenerationAlert, DegenerationMonitor
from storage.base_storage import BaseRunStorage
from utils.config_loader import check_resume_compatible
from utils.env_config import resolve_device
from utils.validation import require
from visualization.image_grid import save_quadruplets

logger = logging.getLogger(__name__)

# Truncation centers are estimated on the EMA generator itself, never copied from the live one.
EMA_SKIP_BUFFERS = ('w_avg', 'w_avg_ready')
GRID_SAMPLES = 8


@dataclass
class FakeBatch:
    """Discriminator fake input and the layers it was built from.

    ``images[:split]`` are foreground-only fakes and ``images[split:]``
    composites. ``masks`` covers all samples; ``backgrounds`` and
    ``composites`` cover the composite part only.
    """

    images: torch.Tensor
    foregrounds: torch.Tensor
    backgrounds: torch.Tensor
    composites: torch.Tensor
    masks: MaskBundle
    split: int

    def __len__(self) -> int:
        return self.images.shape[0]

    @property
    def fg_half(self) -> torch.Tensor:
        return self.images[:self.split]

    @property
    def comp_half(self) -> torch.Tensor:
        return self.images[self.split:]

    @property
    def fg_of_composites(self) -> torch.Tensor:
        """Foreground images the composites were made from."""
        return self.foregrounds[self.split:]


def build_fake_batch(generator: LayeredGenerator, latents: LatentCode, gamma: float,
                     dual_fake: bool = True, noise_mode: str = 'random') -> FakeBatch:
    """Generate a fake minibatch for the discriminator.

    Each latent yields its own foreground and mask; the second half of the
    latents also yields backgrounds for compositing. With ``dual_fake`` off
    every fake is a composite.
    """
    batch = len(latents)
    require(batch % 2 == 0, f"fake batch must be even to split into halves, got {batch}", batch=batch)
    split = batch // 2 if dual_fake else 0
    foregrounds, features = generator.generate_foreground(latents, noise_mode=noise_mode)
    masks = generator.generate_mask(features, gamma)
    backgrounds = generator.generate_background(latents.slice(split, batch), noise_mode=noise_mode)
    composites = composite(foregrounds[split:], backgrounds, masks.mask[split:])
    return FakeBatch(
        images=torch.cat([foregrounds[:split], composites]),
        foregrounds=foregrounds,
        backgrounds=backgrounds,
        composites=composites,
        masks=masks,
        split=split,
    )


@torch.no_grad()
def update_ema(ema: torch.nn.Module, model: torch.nn.Module, beta: float) -> None:
    """ema <- beta * ema + (1 - beta) * model, buffers copied."""
    for p_ema, p in zip(ema.parameters(), model.parameters()):
        p_ema.copy_(p.lerp(p_ema, beta))
    for (name, b_ema), (_, b) in zip(ema.named_buffers(), model.named_buffers()):
        if not name.endswith(EMA_SKIP_BUFFERS):
            b_ema.copy_(b)


class StepHook(Protocol):
    def on_step(self, report: LossReport, duration_ms: float, alert: Optional[DegenerationAlert]) -> None:
        ...

    def on_abort(self, error: TrainingAbortedError) -> None:
        ...


class TrainingService:
    """Owns the configuration, degeneration monitor and run storage of one training run."""

    def __init__(self, config: TrainConfig, storage: Optional[BaseRunStorage] = None,
                 device=None, step_hooks: Optional[List[StepHook]] = None, show_progress: bool = True):
        self.config = config
        self.storage = storage
        self.device = device if isinstance(device, torch.device) else resolve_device(device or config.device)
        self.monitor = DegenerationMonitor(config.monitor_window, config.monitor_low, config.monitor_high)
        self.step_hooks = list(step_hooks or [])
        self.show_progress = show_progress
        self.ema_beta = ema_beta(config.batch_size, config.ema_kimg)
        self.last_alert: Optional[DegenerationAlert] = None
        self._process = psutil.Process()

    # ------------------------------------------------------------------
    # State
    # ------------------------------------------------------------------

    def schedule(self, iteration: int) -> Tuple[float, float]:
        """``(gamma, c_bin)`` for ``iteration``."""
        c = self.config
        return (
            fine_mask_gamma(iteration, c.schedule_iterations),
            binarization_coefficient(iteration, c.c_bin_start, c.c_bin_end, c.schedule_iterations),
        )

    def create_state(self) -> TrainState:
        """Fresh networks and optimizers, seeded from the config."""
        c = self.config
        torch.manual_seed(c.seed)
        generator = LayeredGenerator(c.generator_config()).to(self.device)
        discriminator = Discriminator(c.resolution, c.channel_base, c.channel_max).to(self.device)
        generator_ema = copy.deepcopy(generator).eval().requires_grad_(False)

        g_optimizer = torch.optim.Adam(generator.parameters(), lr=c.lr_g, betas=(c.beta1, c.beta2))
        ratio = lazy_regularization_ratio(c.r1_interval)
        d_optimizer = torch.optim.Adam(
            discriminator.parameters(), lr=c.lr_d * ratio, betas=(c.beta1 ** ratio, c.beta2 ** ratio)
        )
        gamma, c_bin = self.schedule(0)
        logger.info(
            f"Networks built on {self.device}: G {_count(generator):,} params, D {_count(discriminator):,} params"
        )
        return TrainState(
            iteration=0,
            gamma=gamma,
            c_bin=c_bin,
            generator=generator,
            discriminator=discriminator,
            generator_ema=generator_ema,
            g_optimizer=g_optimizer,
            d_optimizer=d_optimizer,
            rng=torch.Generator().manual_seed(c.seed),
        )

    def coefficients(self, state: TrainState) -> LossCoefficients:
        c = self.config
        return LossCoefficients(
            lambda_coarse=c.lambda_coarse,
            lambda_fine=c.lambda_fine,
            c_bin=state.c_bin,
            phi1=c.phi1,
            phi2=c.phi2,
            gamma=state.gamma,
            r1_gamma=c.effective_r1_gamma,
            r1_weight=float(max(c.r1_interval, 1)),
        )

    # ------------------------------------------------------------------
    # One step
    # ------------------------------------------------------------------

    def train_step(self, state: TrainState, real_batch: torch.Tensor) -> Tuple[TrainState, LossReport]:
        """One discriminator update then one generator update.

        Raises:
            TrainingAbortedError: If any loss is NaN or infinite
        """
        c = self.config
        t = state.iteration
        generator, discriminator = state.generator, state.discriminator
        real = real_batch.to(self.device)
        require(tuple(real.shape[1:]) == (3, c.resolution, c.resolution),
                f"real batch shape {tuple(real.shape)} does not match resolution {c.resolution}",
                shape=list(real.shape))

        report = LossReport(
            iteration=t,
            coefficients=self.coefficients(state),
            r1_active=r1_active(t, c.r1_interval),
            consistency_active=c.use_consistency and consistency_active(t, c.every_other_step, c.consistency_start),
            bg_participation_active=c.use_bg_participation and regularization_active(t, c.every_other_step),
        )

        # discriminator
        generator.requires_grad_(False)
        discriminator.requires_grad_(True)
        with torch.no_grad():
            fake = self._fake_batch(state, 'adv_d')
        real_out = discriminator(real)
        fake_out = discriminator(fake.images, detach_mask_trunk=not c.pred_trunk_grad)
        report['adv_d'], _ = adversarial_losses(real_out.logits, fake_out.logits)
        report['pred'] = mask_prediction_loss(fake.masks.mask, fake_out.predicted_mask)
        if report.r1_active:
            report['r1'] = r1_penalty(discriminator, real, report.coefficients.r1_gamma)
        else:
            report['r1'] = real.new_zeros(())
        self._check_finite(report, t)
        state.d_optimizer.zero_grad(set_to_none=True)
        total_discriminator_loss(report).backward()
        state.d_optimizer.step()

        # generator
        generator.requires_grad_(True)
        discriminator.requires_grad_(False)
        fake = self._fake_batch(state, 'adv_g')
        fake_out = discriminator(fake.images)
        masks = fake.masks
        zero = fake_out.logits.new_zeros(())
        report['adv_g'] = generator_adversarial_loss(fake_out.logits)
        report['binary'] = binarization_loss(masks.coarse)
        report['area_coarse'] = coarse_area_loss(masks.coarse, c.phi1, c.area_scope)
        report['area_fine'] = fine_area_loss(masks.fine_contribution, c.phi2, c.fine_area_mode, c.area_scope)
        if report.consistency_active:
            report['consistency'] = mask_consistency_loss(
                fake.fg_of_composites, fake_out.predicted_mask[fake.split:], discriminator.predict_mask
            )
        else:
            report['consistency'] = zero
        if report.bg_participation_active:
            report['bg_participation'] = background_participation_loss(fake.composites, fake.backgrounds)
        else:
            report['bg_participation'] = zero
        self._check_finite(report, t)
        state.g_optimizer.zero_grad(set_to_none=True)
        total_generator_loss(report).backward()
        state.g_optimizer.step()
        discriminator.requires_grad_(True)

        update_ema(state.generator_ema, generator, self.ema_beta)
        report.coverage = masks.coverage()
        self.last_alert = self.monitor.update(t, report.coverage)

        state.iteration = t + 1
        state.samples_seen += real_batch.shape[0]
        state.gamma, state.c_bin = self.schedule(state.iteration)
        return state, report

    def _fake_batch(self, state: TrainState, loss_name: str) -> FakeBatch:
        """Fake batch for one phase; a non-finite generator aborts the run under ``loss_name``."""
        generator = state.generator
        latents = generator.sample_latents(self.config.batch_size, state.rng)
        try:
            return build_fake_batch(generator, latents, state.gamma, self.config.dual_fake)
        except ContractViolationError as e:
            if not e.details.get('non_finite'):
                raise
            raise TrainingAbortedError(loss_name, state.iteration, float('nan')) from e

    def _check_finite(self, report: LossReport, iteration: int) -> None:
        name = report.first_non_finite()
        if name is not None:
            raise TrainingAbortedError(name, iteration, float(report[name].detach()))

    # ------------------------------------------------------------------
    # Loop
    # ------------------------------------------------------------------

    def real_batches(self, skip_samples: int = 0) -> Iterator[torch.Tensor]:
        """Endless shuffled real batches, starting ``skip_samples`` into the seeded stream."""
        c = self.config
        dataset = build_dataset(DatasetSpec.from_train_config(c))
        return iter(batch_stream(dataset, c.batch_size, seed=c.seed, wraparound=True,
                                 num_workers=c.num_workers, skip=skip_samples))

    def run(self, state: Optional[TrainState] = None,
            batches: Optional[Iterator[torch.Tensor]] = None) -> TrainState:
        """Train until ``total_iterations``, logging, gridding and checkpointing on schedule."""
        c = self.config
        state = state or self.create_state()
        batches = batches if batches is not None else self.real_batches(state.samples_seen)
        logger.info(f"Training from iteration {state.iteration} to {c.total_iterations}")

        last_saved = state.iteration
        progress = tqdm(range(state.iteration, c.total_iterations), initial=state.iteration,
                        total=c.total_iterations, desc='train', disable=not self.show_progress)
        for _ in progress:
            start = time.monotonic()
            try:
                state, report = self.train_step(state, next(batches))
            except TrainingAbortedError as e:
                for hook in self.step_hooks:
                    hook.on_abort(e)
                raise
            duration_ms = (time.monotonic() - start) * 1000

            if self.storage is not None:
                self.storage.append_metrics(self.metrics_record(report, state, duration_ms))
            for hook in self.step_hooks:
                hook.on_step(report, duration_ms, self.last_alert)
            progress.set_postfix(g=f"{float(report['adv_g']):.3f}", d=f"{float(report['adv_d']):.3f}",
                                 cov=f"{report.coverage:.2f}")

            if self.storage is not None:
                if state.iteration % c.grid_every == 0:
                    self.save_grid(state)
                if state.iteration % c.checkpoint_every == 0:
                    self.save(state)
                    last_saved = state.iteration

        if self.storage is not None and last_saved != state.iteration:
            self.save(state)
        logger.info(f"✅ Training finished at iteration {state.iteration}")
        return state

    def metrics_record(self, report: LossReport, state: TrainState, duration_ms: float) -> Dict[str, Any]:
        """One JSON-lines record: the report plus schedule values, timing, memory and any alert."""
        record = report.to_dict()
        record.update({
            'next_gamma': state.gamma,
            'next_c_bin': state.c_bin,
            'rolling_coverage': self.monitor.rolling_coverage,
            'duration_ms': round(duration_ms, 3),
            'memory_mb': round(self._process.memory_info().rss / 2 ** 20, 1),
            'alert': self.last_alert.to_dict() if self.last_alert else None,
        })
        return record

    @torch.no_grad()
    def save_grid(self, state: TrainState) -> None:
        """Quadruplets from the EMA generator on fixed latents."""
        ema = state.generator_ema
        latents = ema.sample_latents(GRID_SAMPLES, torch.Generator().manual_seed(self.config.seed))
        sample = ema.synthesize(latents, gamma=state.gamma, noise_mode='const')
        save_quadruplets(sample, self.storage.grid_path(f'iter-{state.iteration:07d}'))

    # ------------------------------------------------------------------
    # Checkpoints
    # ------------------------------------------------------------------

    def checkpoint_payload(self, state: TrainState) -> Dict[str, Any]:
        """Everything needed to continue the run bit-identically."""
        state.generator_ema.update_mean_styles(self.config.truncation_samples, seed=self.config.seed)
        return {
            'config': self.config.to_dict(),
            'iteration': state.iteration,
            'samples_seen': state.samples_seen,
            'generator': state.generator.state_dict(),
            'discriminator': state.discriminator.state_dict(),
            'generator_ema': state.generator_ema.state_dict(),
            'g_optimizer': state.g_optimizer.state_dict(),
            'd_optimizer': state.d_optimizer.state_dict(),
            'rng': {
                'torch': torch.get_rng_state(),
                'cuda': torch.cuda.get_rng_state_all() if torch.cuda.is_available() else [],
                'latent': state.rng.get_state(),
            },
            'monitor': self.monitor.state_dict(),
        }

    def save(self, state: TrainState):
        return self.storage.save_checkpoint(self.checkpoint_payload(state), state.iteration)

    def restore(self, payload: Dict[str, Any]) -> TrainState:
        """Rebuild a TrainState from a checkpoint payload.

        Raises:
            ConfigError: If an architecture key differs from the current config
        """
        check_resume_compatible(self.config, payload['config'])
        state = self.create_state()
        state.generator.load_state_dict(payload['generator'])
        state.discriminator.load_state_dict(payload['discriminator'])
        state.generator_ema.load_state_dict(payload['generator_ema'])
        if 'g_optimizer' in payload:
            state.g_optimizer.load_state_dict(payload['g_optimizer'])
            state.d_optimizer.load_state_dict(payload['d_optimizer'])
        rng = payload.get('rng', {})
        if 'latent' in rng:
            state.rng.set_state(rng['latent'].cpu())
        if 'torch' in rng:
            torch.set_rng_state(rng['torch'].cpu())
        if rng.get('cuda') and torch.cuda.is_available():
            torch.cuda.set_rng_state_all([s.cpu() for s in rng['cuda']])
        self.monitor.load_state_dict(payload.get('monitor', {}))
        state.iteration = int(payload['iteration'])
        state.samples_seen = int(payload.get('samples_seen', state.iteration * self.config.batch_size))
        state.gamma, state.c_bin = self.schedule(state.iteration)
        logger.info(f"Restored training state at iteration {state.iteration}")
        return state


def _count(module: torch.nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())
