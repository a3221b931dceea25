"""Step-size schedules for the online learners."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from ..errors import ConfigurationError
from .prox import ProxSetup


class ScheduleKind(str, Enum):
    PAPER = "paper"
    OPTIMAL = "optimal"
    SQRT = "sqrt"
    CUSTOM = "custom"


@dataclass(frozen=True)
class StepSchedule:
    """
    η_t for t = 1, 2, ...

    paper    2Ω/(G²T), constant
    optimal  √(2Ω/(G²T)), constant; pairs with the √(2ΩG²T) mirror-descent bound
    sqrt     (√Ω̂/G)/√t, for the implicit learners
    custom   a table η_1..η_k; the last entry repeats past k
    """

    kind: ScheduleKind
    width: float = 1.0
    G: float = 1.0
    T: int = 1
    etas: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        object.__setattr__(self, "etas", tuple(float(eta) for eta in self.etas))
        if self.kind is ScheduleKind.CUSTOM:
            if not self.etas or any(not eta > 0 for eta in self.etas):
                raise ConfigurationError("custom step sizes must be a nonempty list of positive numbers")
        elif not (self.width > 0 and np.isfinite(self.width) and self.G > 0 and self.T >= 1):
            raise ConfigurationError(
                f"schedule '{self.kind.value}' needs a finite positive width, G > 0 and T ≥ 1"
            )

    @classmethod
    def for_setup(cls, kind, setup: ProxSetup, T, etas=()):
        """Picks Ω for the constant mirror-descent schedules and Ω̂ for sqrt."""
        kind = ScheduleKind(kind)
        if kind is ScheduleKind.CUSTOM:
            return cls(kind, etas=tuple(etas))
        width = setup.omega_hat if kind is ScheduleKind.SQRT else setup.omega
        return cls(kind, width=width, G=setup.G, T=T)

    @classmethod
    def harmonic(cls, T):
        """η_t = 1/t for t ≤ T."""
        return cls(ScheduleKind.CUSTOM, etas=tuple(1.0 / t for t in range(1, T + 1)))


def step_value(schedule: StepSchedule, t):
    """
    η_t of a schedule.

    Args:
        schedule (StepSchedule): The schedule.
        t (int): The step, starting at 1.

    Returns:
        float: The step size.
    """
    if t < 1:
        raise ConfigurationError(f"step index starts at 1, got {t}")
    kind = schedule.kind
    if kind is ScheduleKind.PAPER:
        return 2.0 * schedule.width / (schedule.G ** 2 * schedule.T)
    if kind is ScheduleKind.OPTIMAL:
        return float(np.sqrt(2.0 * schedule.width / (schedule.G ** 2 * schedule.T)))
    if kind is ScheduleKind.SQRT:
        return float(np.sqrt(schedule.width) / schedule.G / np.sqrt(t))
    return schedule.etas[min(t, len(schedule.etas)) - 1]
