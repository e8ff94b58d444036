"""Rolling mask-coverage monitor for full/empty mask collapse."""

import logging
from collections import deque
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from core.exceptions import ContractViolationError

logger = logging.getLogger(__name__)

FULL_COLLAPSE = 'full mask collapse'
EMPTY_COLLAPSE = 'empty mask collapse'


@dataclass
class DegenerationAlert:
    kind: str
    iteration: int
    coverage: float
    rolling_coverage: float
    consecutive_steps: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class DegenerationMonitor:
    """Watches per-step mean mask coverage.

    An alert fires once a streak of ``window`` consecutive steps stays below
    ``low`` (empty collapse) or above ``high`` (full collapse); it fires once
    per streak and re-arms when coverage leaves the band.
    """

    def __init__(self, window: int = 500, low: float = 0.02, high: float = 0.98):
        if not 0.0 < low < high < 1.0:
            raise ContractViolationError(f"Monitor thresholds must satisfy 0 < low < high < 1, got {low}, {high}")
        self.window = window
        self.low = low
        self.high = high
        self._history = deque(maxlen=window)
        self._low_streak = 0
        self._high_streak = 0
        self.alerts = []

    @property
    def rolling_coverage(self) -> Optional[float]:
        if not self._history:
            return None
        return sum(self._history) / len(self._history)

    def update(self, iteration: int, coverage: float) -> Optional[DegenerationAlert]:
        """Record the coverage of step ``iteration``; return an alert if one fires now."""
        coverage = float(coverage)
        self._history.append(coverage)
        self._low_streak = self._low_streak + 1 if coverage < self.low else 0
        self._high_streak = self._high_streak + 1 if coverage > self.high else 0

        kind, streak = None, 0
        if self._high_streak == self.window:
            kind, streak = FULL_COLLAPSE, self._high_streak
        elif self._low_streak == self.window:
            kind, streak = EMPTY_COLLAPSE, self._low_streak
        if kind is None:
            return None

        alert = DegenerationAlert(
            kind=kind,
            iteration=iteration,
            coverage=coverage,
            rolling_coverage=self.rolling_coverage,
            consecutive_steps=streak,
        )
        self.alerts.append(alert)
        logger.warning(f"⚠️ {kind} at iteration {iteration}: coverage {coverage:.4f} for {streak} steps")
        return alert

    @property
    def collapsed(self) -> bool:
        return bool(self.alerts)

    def state_dict(self) -> Dict[str, Any]:
        return {
            'history': list(self._history),
            'low_streak': self._low_streak,
            'high_streak': self._high_streak,
            'alerts': [alert.to_dict() for alert in self.alerts],
        }

    def load_state_dict(self, state: Dict[str, Any]) -> None:
        self._history = deque(state.get('history', []), maxlen=self.window)
        self._low_streak = int(state.get('low_streak', 0))
        self._high_streak = int(state.get('high_streak', 0))
        self.alerts = [DegenerationAlert(**alert) for alert in state.get('alerts', [])]
