"""Per-step training log lines."""

import logging

import psutil

logger = logging.getLogger('fgsynth.steps')


class StepLogger:
    """Logs every ``log_every``-th step.

    Logs:
    - iteration, adversarial losses, coverage, duration ms, resident memory (INFO)
    - any step that raised a degeneration alert (WARNING)
    - a step aborted on a non-finite loss (ERROR)
    """

    def __init__(self, log_every: int = 50):
        self.log_every = max(1, log_every)
        self._process = psutil.Process()

    def on_step(self, report, duration_ms: float, alert=None) -> None:
        if alert is None and report.iteration % self.log_every:
            return
        memory_mb = self._process.memory_info().rss / 2 ** 20
        msg = (
            f"step {report.iteration}: adv_d={float(report['adv_d']):.4f} "
            f"adv_g={float(report['adv_g']):.4f} pred={float(report['pred']):.4f} "
            f"coverage={report.coverage:.3f} ({duration_ms:.1f}ms, {memory_mb:.0f}MB)"
        )
        if alert is not None:
            logger.warning(f"{msg} → {alert.kind}")
        else:
            logger.info(msg)

    def on_abort(self, error) -> None:
        logger.error(f"step {error.iteration} aborted: {error.message}")


def register_step_logging(service, log_every: int = 50) -> StepLogger:
    """Attach a StepLogger to a TrainingService."""
    step_logger = StepLogger(log_every)
    service.step_hooks.append(step_logger)
    return step_logger
