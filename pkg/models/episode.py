"""Episode records produced by the environment players."""
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from models.aug import AugState


class Observation(NamedTuple):
    """The state of ``step`` delivered to the agent at ``arrival_time``."""

    step: int
    state: int
    arrival_time: int


@dataclass
class EpisodeRecord:
    """
    Everything one episode produced.

    ``states``/``actions``/``rewards`` hold the latent trajectory and are kept
    for auditing only; learners read ``observations`` and ``flushed``.
    ``rewards`` are the sampled (Bernoulli) rewards, not their means; they
    are returned with the flush at the end of the episode.
    """

    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    agent_states: List[AugState]
    observations: List[Observation] = field(default_factory=list)
    flushed: List[Observation] = field(default_factory=list)
    inter_arrivals: Optional[np.ndarray] = None
    delays: Optional[np.ndarray] = None
    mask: Optional[np.ndarray] = None

    @property
    def horizon(self) -> int:
        return int(self.actions.shape[0])

    def returned(self) -> List[Observation]:
        """In-episode and flushed observations ordered by step."""
        return sorted(self.observations + self.flushed, key=lambda obs: obs.step)

    def observed_states(self) -> List[Optional[int]]:
        """State of each step as returned to the agent, ``None`` where it was lost."""
        out: List[Optional[int]] = [None] * self.horizon
        for obs in self.returned():
            out[obs.step] = obs.state
        return out
