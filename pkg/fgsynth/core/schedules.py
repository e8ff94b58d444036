"""Iteration-indexed schedules for the training loop."""

DEFAULT_RAMP = 5000


def fine_mask_gamma(iteration: int, ramp: int = DEFAULT_RAMP) -> float:
    """Fine-mask fade-in: min(1, t / ramp)."""
    if ramp <= 0:
        return 1.0
    return min(1.0, iteration / ramp)


def binarization_coefficient(iteration: int, start: float, end: float, ramp: int = DEFAULT_RAMP) -> float:
    """Linear move from ``start`` to ``end`` over ``ramp`` iterations, then constant."""
    progress = fine_mask_gamma(iteration, ramp)
    return start + (end - start) * progress


def regularization_active(iteration: int, every_other_step: bool = True) -> bool:
    """Gate for the consistency and background-participation terms (even steps)."""
    return iteration % 2 == 0 if every_other_step else True


def consistency_active(iteration: int, every_other_step: bool = True, start: int = 0) -> bool:
    return iteration >= start and regularization_active(iteration, every_other_step)


def r1_active(iteration: int, interval: int) -> bool:
    """Lazy R1 runs on steps divisible by ``interval``."""
    return interval > 0 and iteration % interval == 0


def ema_beta(batch_size: int, ema_kimg: float) -> float:
    """Per-step EMA decay giving a half-life of ``ema_kimg`` thousand images."""
    if ema_kimg <= 0:
        return 0.0
    return 0.5 ** (batch_size / (ema_kimg * 1000))


def lazy_regularization_ratio(interval: int) -> float:
    """Optimizer correction k / (k + 1) for a regularizer applied every k steps."""
    if interval <= 0:
        return 1.0
    return interval / (interval + 1)
