"""Critic with auxiliary mask predictor."""

from .critic import Discriminator, DiscriminatorBlock, MaskPredictor, CriticOutput, r1_penalty, PREDICTOR_SIDE

__all__ = ['Discriminator', 'DiscriminatorBlock', 'MaskPredictor', 'CriticOutput', 'r1_penalty', 'PREDICTOR_SIDE']
