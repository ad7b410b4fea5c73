"""
Episode players for delayed and lossy observation channels.

The latent trajectory lives in the player; the policy is queried only with the
augmented state an ``AgentView`` assembles from what was actually delivered.
"""
from typing import List

import numpy as np

from models.aug import AugState, ExecutablePolicy
from models.channels import DelayModel, MissingModel
from models.episode import EpisodeRecord, Observation
from models.mdp import TabularMdp
from services.channels import draw_inter_arrival, sample_mask
from utils.rng import RngStreams


class AgentView:
    """Delivered observations and the agent's own actions, nothing else."""

    def __init__(self, staleness_from_window: bool = False):
        self._staleness_from_window = staleness_from_window
        self._seen: List[Observation] = []
        self._actions: List[int] = []

    @property
    def seen(self) -> List[Observation]:
        return list(self._seen)

    def deliver(self, obs: Observation) -> None:
        if self._seen and obs.step <= self._seen[-1].step:
            raise ValueError(f"observation of step {obs.step} delivered out of order")
        self._seen.append(obs)

    def record_action(self, action: int) -> None:
        self._actions.append(int(action))

    def aug_state(self, h: int) -> AugState:
        """Augmented state at step ``h`` built from deliveries up to now."""
        if not self._seen:
            return AugState(None, tuple(self._actions[:h]), h)
        last = self._seen[-1]
        window = tuple(self._actions[last.step:h])
        staleness = len(window) if self._staleness_from_window else h - last.arrival_time
        return AugState(last.state, window, staleness)


def _reward_draw(mdp: TabularMdp, h: int, s: int, a: int, rng: np.random.Generator) -> float:
    return float(rng.random() < mdp.reward[h, s, a])


def play_episode_delayed(
    mdp: TabularMdp, model: DelayModel, pol: ExecutablePolicy, streams: RngStreams
) -> EpisodeRecord:
    """
    Play one episode with delayed observations.

    At every step the observations due by now are delivered, the agent acts on
    its augmented state, and the step's inter-arrival time is drawn. Whatever
    has not arrived by the end of the episode is flushed.

    Args:
        mdp: Ground-truth MDP
        model: Delay model
        pol: Executable policy queried with the agent's augmented state
        streams: Per-purpose generators of this run

    Returns:
        EpisodeRecord with the latent trajectory, deliveries and flush
    """
    H, S = mdp.horizon, mdp.num_states
    view = AgentView()
    states = np.zeros(H, dtype=int)
    actions = np.zeros(H, dtype=int)
    rewards = np.zeros(H)
    gaps = np.zeros(H, dtype=int)
    delays = np.zeros(H, dtype=int)
    delays[0] = model.initial_delay
    agent_states: List[AugState] = []
    delivered = 0

    s = int(streams.transitions.choice(S, p=mdp.initial_dist))
    for h in range(H):
        states[h] = s
        # arrival times are strictly increasing, so deliveries happen in step order
        while delivered <= h and delivered + delays[delivered] == h:
            view.deliver(Observation(delivered, int(states[delivered]), h))
            delivered += 1
        tau = view.aug_state(h)
        agent_states.append(tau)
        a = pol.act(h, tau, streams.actions)
        actions[h] = a
        view.record_action(a)
        rewards[h] = _reward_draw(mdp, h, s, a, streams.rewards)
        gaps[h] = draw_inter_arrival(model, h, s, a, streams.delays)
        if h < H - 1:
            delays[h + 1] = delays[h] + gaps[h]
            s = int(streams.transitions.choice(S, p=mdp.kernel[h, s, a]))

    flushed = [Observation(i, int(states[i]), H) for i in range(delivered, H)]
    return EpisodeRecord(
        states=states,
        actions=actions,
        rewards=rewards,
        agent_states=agent_states,
        observations=view.seen,
        flushed=flushed,
        inter_arrivals=gaps,
        delays=delays,
    )


def play_episode_missing(
    mdp: TabularMdp, model: MissingModel, pol: ExecutablePolicy, streams: RngStreams
) -> EpisodeRecord:
    """Play one episode through a lossy channel; lost observations are never delivered."""
    H, S = mdp.horizon, mdp.num_states
    view = AgentView(staleness_from_window=True)
    mask = sample_mask(model, streams.masks)
    states = np.zeros(H, dtype=int)
    actions = np.zeros(H, dtype=int)
    rewards = np.zeros(H)
    agent_states: List[AugState] = []

    s = int(streams.transitions.choice(S, p=mdp.initial_dist))
    for h in range(H):
        states[h] = s
        if mask[h]:
            view.deliver(Observation(h, s, h))
        tau = view.aug_state(h)
        agent_states.append(tau)
        a = pol.act(h, tau, streams.actions)
        actions[h] = a
        view.record_action(a)
        rewards[h] = _reward_draw(mdp, h, s, a, streams.rewards)
        if h < H - 1:
            s = int(streams.transitions.choice(S, p=mdp.kernel[h, s, a]))

    return EpisodeRecord(
        states=states,
        actions=actions,
        rewards=rewards,
        agent_states=agent_states,
        observations=view.seen,
        mask=mask,
    )
