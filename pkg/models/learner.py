"""Learner-side types: counters, bonus configuration and regret traces."""
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field


class BonusConfig(BaseModel):
    """Bonus multiplier ``c`` and failure probability ``γ``; ``ι = log(SAKH/γ)``."""

    model_config = ConfigDict(frozen=True)

    c: float = Field(default=1.0, gt=0.0)
    gamma: float = Field(default=0.1, gt=0.0, lt=1.0)
    num_states: int = Field(gt=0)
    num_actions: int = Field(gt=0)
    episodes: int = Field(gt=0)
    horizon: int = Field(gt=0)

    @computed_field  # type: ignore[misc]
    @cached_property
    def iota(self) -> float:
        return math.log(
            self.num_states * self.num_actions * self.episodes * self.horizon / self.gamma
        )


@dataclass
class Counts:
    """Visit counters accumulated from returned episode data.

    Delayed setting: ``visits[h, s, a]``, ``transitions[h, s, a, s']`` (``h < H-1``)
    and ``inter_arrivals[h, s, a, δ]``. Missing setting additionally holds
    per-layer augmented counters aligned with a skeleton's layer indices, the
    one-step counters filtered on both endpoints being observed, and
    ``missing[h]``, the number of episodes whose step-h observation was lost.
    """

    visits: np.ndarray
    transitions: np.ndarray
    inter_arrivals: np.ndarray
    aug_visits: List[np.ndarray] = field(default_factory=list)
    aug_transitions: List[np.ndarray] = field(default_factory=list)
    missing: Optional[np.ndarray] = None
    episodes: int = 0

    @classmethod
    def empty(
        cls,
        num_states: int,
        num_actions: int,
        horizon: int,
        layer_sizes: Optional[List[int]] = None,
    ) -> "Counts":
        S, A, H = num_states, num_actions, horizon
        counts = cls(
            visits=np.zeros((H, S, A), dtype=np.int64),
            transitions=np.zeros((H, S, A, S), dtype=np.int64),
            inter_arrivals=np.zeros((H, S, A, H + 1), dtype=np.int64),
        )
        if layer_sizes is not None:
            counts.aug_visits = [np.zeros((n, A), dtype=np.int64) for n in layer_sizes]
            counts.aug_transitions = [np.zeros((n, A, S), dtype=np.int64) for n in layer_sizes]
            counts.missing = np.zeros(H, dtype=np.int64)
        return counts


@dataclass(frozen=True)
class TraceRecord:
    episode: int
    regret_increment: float
    cumulative_regret: float
    optimistic_value: float
    oracle_value: float


@dataclass
class RegretTrace:
    """Per-episode exact regret of one learner run."""

    algorithm: str
    instance: str
    seed: int
    records: List[TraceRecord] = field(default_factory=list)
    optimism_flags: List[bool] = field(default_factory=list)
    config_hash: str = ""
    wall_time: float = 0.0
    extra: Dict[str, Any] = field(default_factory=dict)

    def append(
        self, increment: float, optimistic_value: float, oracle_value: float, optimistic: bool
    ) -> None:
        previous = self.records[-1].cumulative_regret if self.records else 0.0
        self.records.append(
            TraceRecord(
                episode=len(self.records) + 1,
                regret_increment=increment,
                cumulative_regret=previous + increment,
                optimistic_value=optimistic_value,
                oracle_value=oracle_value,
            )
        )
        self.optimism_flags.append(optimistic)

    @property
    def increments(self) -> np.ndarray:
        return np.array([r.regret_increment for r in self.records])

    @property
    def cumulative(self) -> np.ndarray:
        return np.array([r.cumulative_regret for r in self.records])

    @property
    def final_regret(self) -> float:
        return self.records[-1].cumulative_regret if self.records else 0.0

    def decile_slopes(self) -> tuple[float, float]:
        """Mean per-episode regret over the first and the last tenth of the run."""
        increments = self.increments
        if increments.size == 0:
            return 0.0, 0.0
        width = max(1, increments.size // 10)
        return float(increments[:width].mean()), float(increments[-width:].mean())

    @property
    def optimism_rate(self) -> float:
        if not self.optimism_flags:
            return 1.0
        return float(np.mean(self.optimism_flags))
