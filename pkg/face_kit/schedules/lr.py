"""Learning-rate schedules: linear warmup followed by step decay or cosine annealing."""

import bisect
import math
from dataclasses import dataclass, field

from face_kit.errors import ConfigError

SCHEDULE_KINDS = ("cosine", "step")


@dataclass
class Schedule:
    """
    Learning-rate schedule over total_steps optimizer steps.

    The warmup ramps linearly from eta0 / warmup_steps to eta0. After it the
    cosine kind anneals to exactly 0 at total_steps; the step kind multiplies
    eta0 by step_factor at every milestone passed.

    Example:
        >>> s = Schedule(kind="cosine", eta0=0.1, total_steps=100)
        >>> lr_at(s, 0), lr_at(s, 100)
        (0.1, 0.0)
    """

    kind: str = "cosine"
    eta0: float = 0.1
    warmup_steps: int = 0
    total_steps: int = 100
    step_milestones: list[int] = field(default_factory=list)
    step_factor: float = 0.1

    def __post_init__(self):
        self.kind = str(self.kind).lower()
        self.step_milestones = [int(m) for m in self.step_milestones]
        self.validate()

    def validate(self) -> None:
        if self.kind not in SCHEDULE_KINDS:
            raise ConfigError(f"unknown schedule kind {self.kind!r} (expected one of {', '.join(SCHEDULE_KINDS)})")
        if not math.isfinite(self.eta0) or self.eta0 < 0:
            raise ConfigError(f"eta0 must be finite and non-negative, got {self.eta0}")
        if self.total_steps < 1:
            raise ConfigError(f"total_steps must be positive, got {self.total_steps}")
        if not 0 <= self.warmup_steps < self.total_steps:
            raise ConfigError(
                f"warmup_steps must be in [0, total_steps), got {self.warmup_steps} with total {self.total_steps}"
            )
        if any(b <= a for a, b in zip(self.step_milestones, self.step_milestones[1:])):
            raise ConfigError(f"milestones must be strictly increasing, got {self.step_milestones}")
        if self.kind == "step" and not 0.0 < self.step_factor < 1.0:
            raise ConfigError(f"step_factor must be in (0, 1), got {self.step_factor}")


def lr_at(s: Schedule, t: int) -> float:
    """
    Learning rate at step t.

    Args:
        s: The schedule.
        t: Step index in [0, total_steps]; total_steps is the terminal point.

    Returns:
        The learning rate.

    Raises:
        ConfigError: If t is out of range.
    """
    if not 0 <= t <= s.total_steps:
        raise ConfigError(f"step {t} outside [0, {s.total_steps}]")
    if t < s.warmup_steps:
        return s.eta0 * (t + 1) / s.warmup_steps
    if s.kind == "cosine":
        elapsed = t - s.warmup_steps
        span = s.total_steps - s.warmup_steps
        return s.eta0 * 0.5 * (1.0 + math.cos(math.pi * elapsed / span))
    passed = bisect.bisect_right(s.step_milestones, t)
    return s.eta0 * s.step_factor**passed


def lr_table(s: Schedule) -> list[tuple[int, float]]:
    """(t, lr) for every t in [0, total_steps]."""
    return [(t, lr_at(s, t)) for t in range(s.total_steps + 1)]
