"""Ground-truth episodic tabular MDP types."""
from dataclasses import dataclass, field

import numpy as np


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class TabularMdp:
    """Episodic MDP with step-dependent rewards and kernels.

    Shapes (0-based steps): ``reward`` is ``(H, S, A)``, ``kernel`` is
    ``(H-1, S, A, S)`` since no transition leaves the last step, and
    ``initial_dist`` is ``(S,)``.
    """

    reward: np.ndarray
    kernel: np.ndarray
    initial_dist: np.ndarray
    name: str = "instance"

    def __post_init__(self) -> None:
        object.__setattr__(self, "reward", _frozen(self.reward))
        object.__setattr__(self, "kernel", _frozen(self.kernel))
        object.__setattr__(self, "initial_dist", _frozen(self.initial_dist))

    @property
    def num_states(self) -> int:
        return int(self.reward.shape[1])

    @property
    def num_actions(self) -> int:
        return int(self.reward.shape[2])

    @property
    def horizon(self) -> int:
        return int(self.reward.shape[0])


@dataclass(frozen=True, eq=False)
class MarkovPolicy:
    """``action_dist[h, s]`` is a distribution over actions."""

    action_dist: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "action_dist", _frozen(self.action_dist))

    @classmethod
    def deterministic(cls, actions: np.ndarray, num_actions: int) -> "MarkovPolicy":
        actions = np.asarray(actions, dtype=int)
        dist = np.zeros(actions.shape + (num_actions,))
        np.put_along_axis(dist, actions[..., None], 1.0, axis=-1)
        return cls(dist)

    @classmethod
    def uniform(cls, horizon: int, num_states: int, num_actions: int) -> "MarkovPolicy":
        return cls(np.full((horizon, num_states, num_actions), 1.0 / num_actions))

    def greedy_actions(self) -> np.ndarray:
        return np.argmax(self.action_dist, axis=-1)


@dataclass(frozen=True, eq=False)
class ValueTable:
    """``v`` is ``(H+1, S)`` and ``q`` is ``(H+1, S, A)``; the last rows are zero."""

    v: np.ndarray
    q: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "v", _frozen(self.v))
        object.__setattr__(self, "q", _frozen(self.q))

    def initial_value(self, initial_dist: np.ndarray) -> float:
        """Value at step 0 averaged over an initial distribution."""
        return float(np.dot(initial_dist, self.v[0]))
