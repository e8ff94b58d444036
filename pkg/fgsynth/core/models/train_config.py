"""Generator and training configuration models."""

import json
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Optional

# Keys that change network shapes; a resumed run must match them exactly.
ARCHITECTURE_KEYS = (
    'resolution', 'reference_latent_dim', 'channel_base', 'channel_max',
    'mapping_depth', 'mask_head_channels', 'use_fine_mask',
)

UNALIGNED_PHI1 = {'lsun_object': 0.2, 'cub': 0.1}
UNALIGNED_C_BIN_END = 2.0


@dataclass(frozen=True)
class GeneratorConfig:
    """Shape of the layered generator.

    Channel widths follow min(channel_base // res, channel_max) for the
    reference network; the foreground branch takes ``fg_fraction`` of it and
    the background branch ``bg_fraction``.
    """

    resolution: int = 64
    base_resolution: int = 4
    reference_latent_dim: int = 256
    channel_base: int = 4096
    channel_max: int = 256
    fg_fraction: float = 0.75
    bg_fraction: float = 0.25
    mapping_depth: int = 2
    mask_head_channels: int = 32
    use_fine_mask: bool = True

    @property
    def fg_latent_dim(self) -> int:
        return round(self.reference_latent_dim * self.fg_fraction)

    @property
    def bg_latent_dim(self) -> int:
        return round(self.reference_latent_dim * self.bg_fraction)

    def reference_channels(self, res: int) -> int:
        return min(self.channel_base // res, self.channel_max)

    def branch_channels(self, fraction: float) -> Dict[int, int]:
        """Feature width per resolution for one branch."""
        widths = {}
        res = self.base_resolution
        while res <= self.resolution:
            widths[res] = max(1, round(self.reference_channels(res) * fraction))
            res *= 2
        return widths

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class TrainConfig:
    """Flat training configuration, one field per TOML key."""

    seed: int = 0
    run_name: str = 'run'
    device: str = 'auto'

    # architecture
    resolution: int = 64
    reference_latent_dim: int = 256
    channel_base: int = 4096
    channel_max: int = 256
    mapping_depth: int = 2
    mask_head_channels: int = 32

    # optimization
    batch_size: int = 16
    total_iterations: int = 20000
    lr_g: float = 2e-3
    lr_d: float = 2e-3
    beta1: float = 0.0
    beta2: float = 0.99
    ema_kimg: float = 10.0
    r1_gamma: Optional[float] = None
    r1_interval: int = 16

    # losses and schedules
    lambda_coarse: float = 5.0
    lambda_fine: float = 5.0
    phi1: float = 0.35
    phi2: float = 0.01
    c_bin_start: float = 1.0
    c_bin_end: float = 0.5
    schedule_iterations: int = 5000
    every_other_step: bool = True
    consistency_start: int = 0
    area_scope: str = 'sample'
    fine_area_mode: str = 'printed'
    pred_trunk_grad: bool = True

    # ablations
    dual_fake: bool = True
    use_consistency: bool = True
    use_bg_participation: bool = True
    use_fine_mask: bool = True

    # unaligned datasets
    unaligned: bool = False
    dataset_kind: str = 'aligned'

    # data
    data_source: str = 'oracle'
    data_path: str = ''
    center_crop: bool = False
    oracle_size: int = 10000
    num_workers: int = 0

    # monitoring and outputs
    monitor_window: int = 500
    monitor_low: float = 0.02
    monitor_high: float = 0.98
    log_every: int = 50
    checkpoint_every: int = 2000
    grid_every: int = 1000
    truncation_samples: int = 10000

    @property
    def effective_r1_gamma(self) -> float:
        """R1 weight, 10 at 256x256 scaled with the pixel count."""
        if self.r1_gamma is not None:
            return self.r1_gamma
        return 10.0 * (self.resolution / 256) ** 2

    def generator_config(self) -> GeneratorConfig:
        return GeneratorConfig(
            resolution=self.resolution,
            reference_latent_dim=self.reference_latent_dim,
            channel_base=self.channel_base,
            channel_max=self.channel_max,
            mapping_depth=self.mapping_depth,
            mask_head_channels=self.mask_head_channels,
            use_fine_mask=self.use_fine_mask,
        )

    def architecture(self) -> Dict[str, Any]:
        return {key: getattr(self, key) for key in ARCHITECTURE_KEYS}

    def replace(self, **changes) -> 'TrainConfig':
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TrainConfig':
        """Create TrainConfig from dictionary, ignoring unknown keys."""
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


def unaligned_mode_adjustments(config: TrainConfig) -> TrainConfig:
    """Apply the unaligned-dataset preset.

    Terminal binarization coefficient 2.0, consistency only after the
    schedule ramp, batch-scope area losses, per-dataset phi1 and
    center-crop preprocessing. Aligned configs are returned as is.
    """
    if not config.unaligned:
        return config
    return config.replace(
        c_bin_end=UNALIGNED_C_BIN_END,
        consistency_start=config.schedule_iterations,
        area_scope='batch',
        phi1=UNALIGNED_PHI1.get(config.dataset_kind, config.phi1),
        center_crop=True,
    )
