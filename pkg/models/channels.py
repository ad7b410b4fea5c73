"""Observation-impairment model types."""
from dataclasses import dataclass

import numpy as np

from models.mdp import _frozen

# Sentinel for "no observation has arrived yet" in nearest-visible indices.
NOTHING_VISIBLE = -1


@dataclass(frozen=True, eq=False)
class DelayModel:
    """Inter-arrival distributions conditioned on ``(h, s, a)``.

    ``pmf`` has shape ``(H, S, A, H+1)``: the last axis runs over
    ``Δ ∈ {0, …, Δ_max}`` with ``Δ_max = H``. ``initial_delay`` is ``d_1``, the
    delay of the very first observation.
    """

    pmf: np.ndarray
    initial_delay: int = 0
    kind: str = "table"

    def __post_init__(self) -> None:
        object.__setattr__(self, "pmf", _frozen(self.pmf))

    @property
    def max_delay(self) -> int:
        return int(self.pmf.shape[-1]) - 1

    @property
    def horizon(self) -> int:
        return int(self.pmf.shape[0])

    def mean_inter_arrival(self, h: int, s: int, a: int) -> float:
        return float(np.dot(np.arange(self.max_delay + 1), self.pmf[h, s, a]))


@dataclass(frozen=True, eq=False)
class MissingModel:
    """``rates[h]`` is the probability that the step-h observation survives the channel."""

    rates: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "rates", _frozen(self.rates))

    @property
    def floor(self) -> float:
        return float(np.min(self.rates))

    @property
    def horizon(self) -> int:
        return int(self.rates.shape[0])


@dataclass(frozen=True, eq=False)
class ArrivalSchedule:
    """Per-episode delays ``d``, inter-arrivals and nearest-visible indices.

    ``nearest_visible[h]`` is ``t_h`` or ``NOTHING_VISIBLE`` before the first
    arrival. The observation of step ``i`` arrives at time ``i + delays[i]``.
    """

    delays: np.ndarray
    inter_arrivals: np.ndarray
    nearest_visible: np.ndarray

    def arrival_time(self, step: int) -> int:
        return int(step + self.delays[step])

    def arrivals_at(self, time: int) -> list[int]:
        """Steps whose observation arrives exactly at ``time``."""
        return [i for i in range(len(self.delays)) if self.arrival_time(i) == time]
