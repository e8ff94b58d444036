"""Validation schemas for run configuration."""

from marshmallow import RAISE, Schema, ValidationError, fields, post_load, validate, validates, validates_schema

from core.models.train_config import TrainConfig, unaligned_mode_adjustments

_UNIT = validate.Range(min=0, max=1, min_inclusive=False, max_inclusive=False)
_POSITIVE = validate.Range(min=1)
_NON_NEGATIVE = validate.Range(min=0)


class TrainConfigSchema(Schema):
    """Schema for the flat TOML training configuration.

    Unknown keys are rejected by name. Loading returns a TrainConfig with the
    unaligned-dataset preset already applied.
    """

    class Meta:
        unknown = RAISE

    seed = fields.Int(load_default=0, validate=_NON_NEGATIVE)
    run_name = fields.Str(load_default='run', validate=validate.Length(min=1, max=100))
    device = fields.Str(load_default='auto', validate=validate.OneOf(['auto', 'cpu', 'cuda']))

    resolution = fields.Int(load_default=64)
    reference_latent_dim = fields.Int(load_default=256, validate=validate.Range(min=8))
    channel_base = fields.Int(load_default=4096, validate=_POSITIVE)
    channel_max = fields.Int(load_default=256, validate=validate.Range(min=4))
    mapping_depth = fields.Int(load_default=2, validate=validate.Range(min=1, max=8))
    mask_head_channels = fields.Int(load_default=32, validate=_POSITIVE)

    batch_size = fields.Int(load_default=16, validate=validate.Range(min=2))
    total_iterations = fields.Int(load_default=20000, validate=_NON_NEGATIVE)
    lr_g = fields.Float(load_default=2e-3, validate=validate.Range(min=0, min_inclusive=False))
    lr_d = fields.Float(load_default=2e-3, validate=validate.Range(min=0, min_inclusive=False))
    beta1 = fields.Float(load_default=0.0, validate=validate.Range(min=0, max=1, max_inclusive=False))
    beta2 = fields.Float(load_default=0.99, validate=validate.Range(min=0, max=1, max_inclusive=False))
    ema_kimg = fields.Float(load_default=10.0, validate=_NON_NEGATIVE)
    r1_gamma = fields.Float(load_default=None, allow_none=True, validate=_NON_NEGATIVE)
    r1_interval = fields.Int(load_default=16, validate=_NON_NEGATIVE)

    lambda_coarse = fields.Float(load_default=5.0, validate=_NON_NEGATIVE)
    lambda_fine = fields.Float(load_default=5.0, validate=_NON_NEGATIVE)
    phi1 = fields.Float(load_default=0.35, validate=_UNIT)
    phi2 = fields.Float(load_default=0.01, validate=_UNIT)
    c_bin_start = fields.Float(load_default=1.0, validate=_NON_NEGATIVE)
    c_bin_end = fields.Float(load_default=0.5, validate=_NON_NEGATIVE)
    schedule_iterations = fields.Int(load_default=5000, validate=_NON_NEGATIVE)
    every_other_step = fields.Bool(load_default=True)
    consistency_start = fields.Int(load_default=0, validate=_NON_NEGATIVE)
    area_scope = fields.Str(load_default='sample', validate=validate.OneOf(['sample', 'batch']))
    fine_area_mode = fields.Str(load_default='printed', validate=validate.OneOf(['printed', 'contribution']))
    pred_trunk_grad = fields.Bool(load_default=True)

    dual_fake = fields.Bool(load_default=True)
    use_consistency = fields.Bool(load_default=True)
    use_bg_participation = fields.Bool(load_default=True)
    use_fine_mask = fields.Bool(load_default=True)

    unaligned = fields.Bool(load_default=False)
    dataset_kind = fields.Str(load_default='aligned', validate=validate.OneOf(['aligned', 'lsun_object', 'cub']))

    data_source = fields.Str(load_default='oracle', validate=validate.OneOf(['oracle', 'folder']))
    data_path = fields.Str(load_default='')
    center_crop = fields.Bool(load_default=False)
    oracle_size = fields.Int(load_default=10000, validate=_POSITIVE)
    num_workers = fields.Int(load_default=0, validate=_NON_NEGATIVE)

    monitor_window = fields.Int(load_default=500, validate=_POSITIVE)
    monitor_low = fields.Float(load_default=0.02, validate=_UNIT)
    monitor_high = fields.Float(load_default=0.98, validate=_UNIT)
    log_every = fields.Int(load_default=50, validate=_POSITIVE)
    checkpoint_every = fields.Int(load_default=2000, validate=_POSITIVE)
    grid_every = fields.Int(load_default=1000, validate=_POSITIVE)
    truncation_samples = fields.Int(load_default=10000, validate=_POSITIVE)

    @validates('resolution')
    def validate_resolution(self, value, **kwargs):
        if value < 16 or value & (value - 1):
            raise ValidationError('Resolution must be a power of two >= 16')

    @validates('batch_size')
    def validate_batch_size(self, value, **kwargs):
        if value % 2:
            raise ValidationError('Batch size must be even (half foreground, half composite fakes)')

    @validates_schema
    def validate_consistency(self, data, **kwargs):
        if data.get('data_source') == 'folder' and not data.get('data_path'):
            raise ValidationError('data_path is required for folder data', field_name='data_path')
        if data.get('monitor_low', 0.02) >= data.get('monitor_high', 0.98):
            raise ValidationError('monitor_low must be below monitor_high', field_name='monitor_low')
        if data.get('dataset_kind', 'aligned') != 'aligned' and not data.get('unaligned'):
            raise ValidationError('dataset_kind other than aligned needs unaligned = true',
                                  field_name='dataset_kind')

    @post_load
    def make_config(self, data, **kwargs):
        return unaligned_mode_adjustments(TrainConfig(**data))
