"""Layered image generators: foreground, background and mask heads."""

from .layers import (
    EqualizedWeight,
    EqualizedLinear,
    EqualizedConv2d,
    MappingNetwork,
    Conv2dWeightModulate,
    StyleBlock,
    ToRGB,
    UpSample,
    DownSample,
    MiniBatchStdDev,
)
from .style_generator import StyleGenerator, mix_styles, style_bands, STYLE_BANDS
from .mask_generator import MaskGenerator, MaskHead
from .layered_generator import LayeredGenerator, LayeredSample

__all__ = [
    'EqualizedWeight',
    'EqualizedLinear',
    'EqualizedConv2d',
    'MappingNetwork',
    'Conv2dWeightModulate',
    'StyleBlock',
    'ToRGB',
    'UpSample',
    'DownSample',
    'MiniBatchStdDev',
    'StyleGenerator',
    'mix_styles',
    'style_bands',
    'STYLE_BANDS',
    'MaskGenerator',
    'MaskHead',
    'LayeredGenerator',
    'LayeredSample',
]
