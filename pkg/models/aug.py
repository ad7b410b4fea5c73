"""Augmented-MDP types: augmented states, layers, executable policies."""
from dataclasses import dataclass, field, replace
from typing import Dict, List, Literal, NamedTuple, Optional, Sequence

import numpy as np
import numpy.typing as npt

from models.errors import PolicyCoverageError

AugVariant = Literal["delayed-expected", "delayed-past", "missing"]

# Probability vector over S: the distribution of the latent state given τ.
Belief = npt.NDArray[np.float64]

# Transition modes stored per (layer, state).
MODE_TERMINAL = 0      # last layer, no transition
MODE_HAZARD = 1        # pending observation arrives with probability theta_delay
MODE_FORCED = 2        # pending observation arrives with probability one
MODE_ABSORB = 3        # nothing left to arrive
MODE_INITIAL = 4       # first observation arrives now, drawn from the initial distribution
MODE_PRE_ARRIVAL = 5   # first observation still in flight
MODE_MISSING = 6       # next observation survives the channel with probability lambda


class AugState(NamedTuple):
    """Observable history ``τ = (s_t, a_t..a_{h-1}, δ)``.

    ``last_seen`` is ``None`` until the first observation arrives.
    """

    last_seen: Optional[int]
    window: tuple[int, ...]
    staleness: int


@dataclass(eq=False)
class AugLayer:
    """One step of an augmented MDP with interned states.

    ``successors[i, a, k]`` indexes the next layer (``-1`` when absent); slots
    ``k < S`` are "observation of state k arrives", slot ``S`` is "nothing new".

    Per-state metadata (``last_seen`` is ``-1`` before the first arrival,
    ``origin`` is the step of the last seen state or ``-1``) lets estimators
    gather their tables for a whole layer at once. ``head_action[i, a]`` is the
    action played at ``origin``: the first window entry, or ``a`` itself when
    the window is empty. ``parent``/``parent_action`` locate the "nothing new"
    predecessor in the previous layer, ``-1`` for states entered by an arrival.
    """

    states: List[AugState]
    index: Dict[AugState, int]
    successors: np.ndarray
    probs: np.ndarray
    rewards: np.ndarray
    last_seen: np.ndarray
    origin: np.ndarray
    staleness: np.ndarray
    head_action: np.ndarray
    mode: np.ndarray
    parent: np.ndarray
    parent_action: np.ndarray
    beliefs: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return len(self.states)

    def with_weights(self, probs: np.ndarray, rewards: np.ndarray) -> "AugLayer":
        """Same states and successors, new transition probabilities and rewards."""
        return replace(self, probs=probs, rewards=rewards)


@dataclass(eq=False)
class AugMdp:
    """Explicit sparse augmented MDP over reachable augmented states."""

    variant: AugVariant
    base_horizon: int
    num_states: int
    num_actions: int
    layers: List[AugLayer]
    root_weights: np.ndarray
    initial_delay: int = 0

    @property
    def horizon(self) -> int:
        return len(self.layers)

    def layer_sizes(self) -> List[int]:
        return [layer.size for layer in self.layers]

    def num_state_actions(self) -> int:
        return sum(self.layer_sizes()) * self.num_actions

    def reweighted(
        self, probs: Sequence[np.ndarray], rewards: Sequence[np.ndarray]
    ) -> "AugMdp":
        """Copy sharing this MDP's structure with per-layer probabilities and rewards replaced."""
        layers = [
            layer.with_weights(p, r) for layer, p, r in zip(self.layers, probs, rewards)
        ]
        return replace(self, layers=layers)


@dataclass(eq=False)
class AugValues:
    """Per-layer value tables of an augmented MDP under some policy."""

    v: List[np.ndarray]
    q: List[np.ndarray]
    root_weights: np.ndarray = field(repr=False)

    @property
    def root_values(self) -> np.ndarray:
        return self.v[0]

    @property
    def value(self) -> float:
        return float(np.dot(self.root_weights, self.v[0]))


class ExecutablePolicy:
    """Map from ``(step, AugState)`` to a distribution over actions."""

    def __init__(self, layers: Sequence[Dict[AugState, np.ndarray]], num_actions: int):
        self.layers = list(layers)
        self.num_actions = num_actions

    @classmethod
    def from_actions(
        cls, aug: AugMdp, actions: Sequence[np.ndarray]
    ) -> "ExecutablePolicy":
        """Deterministic policy from one greedy action per state and layer."""
        eye = np.eye(aug.num_actions)
        layers = [
            {tau: eye[int(a)] for tau, a in zip(layer.states, layer_actions)}
            for layer, layer_actions in zip(aug.layers, actions)
        ]
        return cls(layers, aug.num_actions)

    @classmethod
    def from_matrices(
        cls, aug: AugMdp, matrices: Sequence[np.ndarray]
    ) -> "ExecutablePolicy":
        layers = [
            {tau: np.asarray(row, dtype=float) for tau, row in zip(layer.states, matrix)}
            for layer, matrix in zip(aug.layers, matrices)
        ]
        return cls(layers, aug.num_actions)

    @property
    def horizon(self) -> int:
        return len(self.layers)

    def distribution(self, h: int, tau: AugState) -> np.ndarray:
        if h >= len(self.layers):
            # beyond the planned layers every action is equivalent
            return np.eye(self.num_actions)[0]
        try:
            return self.layers[h][tau]
        except KeyError:
            raise PolicyCoverageError(f"Policy undefined at step {h} for {tau}") from None

    def act(self, h: int, tau: AugState, rng: Optional[np.random.Generator] = None) -> int:
        dist = self.distribution(h, tau)
        top = int(np.argmax(dist))
        if dist[top] >= 1.0 - 1e-12 or rng is None:
            return top
        return int(rng.choice(self.num_actions, p=dist))

    def matrix(self, h: int, states: Sequence[AugState]) -> np.ndarray:
        """Stack the action distributions of ``states`` into an ``(n, A)`` array."""
        if not states:
            return np.zeros((0, self.num_actions))
        return np.stack([self.distribution(h, tau) for tau in states])
