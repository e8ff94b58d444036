"""Per-step loss report with the coefficients actually applied."""

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

import torch

from core.exceptions import ContractViolationError

DISCRIMINATOR_PARTS = ('adv_d', 'r1', 'pred')
GENERATOR_PARTS = ('adv_g', 'consistency', 'binary', 'area_coarse', 'area_fine', 'bg_participation')
LOSS_NAMES = DISCRIMINATOR_PARTS + GENERATOR_PARTS


@dataclass
class LossCoefficients:
    """Weights echoed from the schedule state for one step."""

    lambda_coarse: float = 5.0
    lambda_fine: float = 5.0
    c_bin: float = 1.0
    phi1: float = 0.35
    phi2: float = 0.01
    gamma: float = 0.0
    r1_gamma: float = 10.0
    r1_weight: float = 16.0

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class LossReport:
    """Named scalar losses of one training step.

    Values are tensors while the step runs (so the totals can be
    back-propagated) and plain floats after ``to_dict``.
    """

    iteration: int = 0
    losses: Dict[str, Any] = field(default_factory=dict)
    coefficients: LossCoefficients = field(default_factory=LossCoefficients)
    r1_active: bool = False
    consistency_active: bool = False
    bg_participation_active: bool = False
    coverage: Optional[float] = None

    def __getitem__(self, name: str):
        if name not in self.losses:
            raise ContractViolationError(
                f"Loss report is missing '{name}'",
                details={'missing': name, 'present': sorted(self.losses)},
            )
        return self.losses[name]

    def __setitem__(self, name: str, value) -> None:
        if name not in LOSS_NAMES:
            raise ContractViolationError(f"Unknown loss name '{name}'", details={'name': name})
        self.losses[name] = value

    def require(self, *names: str) -> None:
        for name in names:
            self[name]

    def first_non_finite(self) -> Optional[str]:
        """Name of the first non-finite loss, in declaration order."""
        for name in LOSS_NAMES:
            if name in self.losses and not math.isfinite(_as_float(self.losses[name])):
                return name
        return None

    def to_dict(self) -> Dict[str, Any]:
        """Convert LossReport to a JSON-ready dictionary."""
        return {
            'iteration': self.iteration,
            'losses': {name: _as_float(self.losses[name]) for name in LOSS_NAMES if name in self.losses},
            'coefficients': self.coefficients.to_dict(),
            'r1_active': self.r1_active,
            'consistency_active': self.consistency_active,
            'bg_participation_active': self.bg_participation_active,
            'coverage': self.coverage,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LossReport':
        """Create LossReport from dictionary."""
        return cls(
            iteration=data['iteration'],
            losses=dict(data.get('losses', {})),
            coefficients=LossCoefficients(**data.get('coefficients', {})),
            r1_active=data.get('r1_active', False),
            consistency_active=data.get('consistency_active', False),
            bg_participation_active=data.get('bg_participation_active', False),
            coverage=data.get('coverage'),
        )


def _as_float(value) -> float:
    if isinstance(value, torch.Tensor):
        return float(value.detach())
    return float(value)
