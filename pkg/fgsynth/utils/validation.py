"""Validation utilities: tensor contracts and Marshmallow schema loading."""

from typing import Any, Dict, Sequence

import torch
from marshmallow import ValidationError as MarshmallowValidationError

from core.exceptions import ConfigError, ContractViolationError


def require(condition: bool, message: str, **details) -> None:
    """Raise ContractViolationError with ``details`` unless ``condition`` holds."""
    if not condition:
        raise ContractViolationError(message, details=details or None)


def require_rank(name: str, tensor: torch.Tensor, rank: int) -> None:
    require(
        tensor.dim() == rank,
        f"{name} must have {rank} dimensions, got shape {tuple(tensor.shape)}",
        name=name, shape=list(tensor.shape),
    )


def require_same_shape(name_a: str, a: torch.Tensor, name_b: str, b: torch.Tensor) -> None:
    """Fail naming every dimension where ``a`` and ``b`` disagree."""
    if a.shape == b.shape:
        return
    mismatched = _mismatched_dims(a.shape, b.shape)
    raise ContractViolationError(
        f"{name_a} shape {tuple(a.shape)} does not match {name_b} shape {tuple(b.shape)}"
        f" (dims {mismatched})",
        details={'dims': mismatched, name_a: list(a.shape), name_b: list(b.shape)},
    )


def require_mask_for(image_name: str, image: torch.Tensor, mask_name: str, mask: torch.Tensor) -> None:
    """Mask must be [B, 1, H, W] with B, H, W equal to the image's."""
    require_rank(mask_name, mask, 4)
    require_rank(image_name, image, 4)
    expected = (image.shape[0], 1, image.shape[2], image.shape[3])
    if tuple(mask.shape) != expected:
        mismatched = _mismatched_dims(mask.shape, expected)
        raise ContractViolationError(
            f"{mask_name} shape {tuple(mask.shape)} cannot blend {image_name} shape "
            f"{tuple(image.shape)} (dims {mismatched})",
            details={'dims': mismatched, mask_name: list(mask.shape), image_name: list(image.shape)},
        )


def require_finite(name: str, tensor: torch.Tensor) -> None:
    """Reject NaN or infinite entries; the error carries ``non_finite=True`` in its details."""
    require(bool(torch.isfinite(tensor).all()), f"{name} contains non-finite values", name=name, non_finite=True)


def require_unit_interval(name: str, value: float, open_interval: bool = False) -> None:
    """Check ``value`` lies in [0, 1], or (0, 1) when ``open_interval``."""
    value = float(value)
    inside = 0.0 < value < 1.0 if open_interval else 0.0 <= value <= 1.0
    bounds = '(0, 1)' if open_interval else '[0, 1]'
    require(inside, f"{name}={value} outside {bounds}", name=name, value=value)


def validate_data(schema_class, data: Dict[str, Any], error_cls=ConfigError) -> Any:
    """Load ``data`` through a Marshmallow schema.

    Args:
        schema_class: Marshmallow schema class to validate against
        data: Raw key-value mapping
        error_cls: Exception raised on failure (details carry the bad keys)

    Returns:
        Whatever the schema's ``load`` (and ``post_load``) produces

    Raises:
        ConfigError: If validation fails
    """
    try:
        return schema_class().load(data)
    except MarshmallowValidationError as e:
        keys = ', '.join(sorted(str(k) for k in e.messages))
        raise error_cls(f'Configuration validation failed for: {keys}', details=e.messages)


def _mismatched_dims(shape_a: Sequence[int], shape_b: Sequence[int]):
    if len(shape_a) != len(shape_b):
        return ['rank']
    names = ['batch', 'channels', 'height', 'width'] if len(shape_a) == 4 else None
    return [
        names[i] if names else i
        for i, (x, y) in enumerate(zip(shape_a, shape_b)) if x != y
    ]
