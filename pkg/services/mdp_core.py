"""Exact evaluation and planning on the ground-truth tabular MDP."""
from typing import Sequence, Tuple

import numpy as np

from models.errors import HorizonError, MdpValidationError
from models.mdp import MarkovPolicy, TabularMdp, ValueTable

PROB_TOL = 1e-12


def validate(mdp: TabularMdp) -> None:
    """
    Check every TabularMdp invariant.

    Args:
        mdp: Instance to check

    Raises:
        MdpValidationError: naming the first violated invariant and its indices
    """
    reward, kernel, init = mdp.reward, mdp.kernel, mdp.initial_dist
    if reward.ndim != 3 or min(reward.shape) < 1:
        raise MdpValidationError(
            f"reward must be a non-empty (H, S, A) array, got shape {reward.shape}"
        )
    H, S, A = reward.shape
    if kernel.shape != (H - 1, S, A, S):
        raise MdpValidationError(
            f"kernel shape {kernel.shape} inconsistent with (H-1, S, A, S) = {(H - 1, S, A, S)}"
        )
    if init.shape != (S,):
        raise MdpValidationError(f"initial_dist shape {init.shape} inconsistent with S={S}")

    bad = np.argwhere((reward < 0.0) | (reward > 1.0) | ~np.isfinite(reward))
    if bad.size:
        h, s, a = (int(i) for i in bad[0])
        raise MdpValidationError(
            f"reward out of [0,1]: {reward[h, s, a]} at (h={h}, s={s}, a={a})"
        )

    negative = np.argwhere(kernel < 0.0)
    if negative.size:
        h, s, a, s_next = (int(i) for i in negative[0])
        raise MdpValidationError(
            f"negative transition probability at (h={h}, s={s}, a={a}, s'={s_next})"
        )
    row_sums = kernel.sum(axis=-1)
    off = np.argwhere(np.abs(row_sums - 1.0) > PROB_TOL)
    if off.size:
        h, s, a = (int(i) for i in off[0])
        raise MdpValidationError(f"row sum {row_sums[h, s, a]:.12g} at (h={h}, s={s}, a={a})")

    if np.any(init < 0.0) or abs(init.sum() - 1.0) > PROB_TOL:
        raise MdpValidationError(
            f"initial_dist is not a probability vector (sum {init.sum():.12g})"
        )


def _check_policy(mdp: TabularMdp, pol: MarkovPolicy) -> None:
    expected = (mdp.horizon, mdp.num_states, mdp.num_actions)
    if pol.action_dist.shape != expected:
        raise MdpValidationError(
            f"policy shape {pol.action_dist.shape} does not match (H, S, A) = {expected}"
        )


def value_iteration(mdp: TabularMdp) -> Tuple[MarkovPolicy, ValueTable]:
    """
    Backward induction for the full-observability optimum.

    Ties are broken toward the lowest action index.

    Returns:
        Deterministic greedy MarkovPolicy and its ValueTable
    """
    H, S, A = mdp.horizon, mdp.num_states, mdp.num_actions
    v = np.zeros((H + 1, S))
    q = np.zeros((H + 1, S, A))
    actions = np.zeros((H, S), dtype=int)
    for h in range(H - 1, -1, -1):
        q[h] = mdp.reward[h]
        if h < H - 1:
            q[h] = q[h] + mdp.kernel[h] @ v[h + 1]
        actions[h] = np.argmax(q[h], axis=1)
        v[h] = q[h].max(axis=1)
    return MarkovPolicy.deterministic(actions, A), ValueTable(v=v, q=q)


def evaluate_markov(mdp: TabularMdp, pol: MarkovPolicy) -> ValueTable:
    """Exact backward-induction evaluation of a Markov policy."""
    _check_policy(mdp, pol)
    H, S, A = mdp.horizon, mdp.num_states, mdp.num_actions
    v = np.zeros((H + 1, S))
    q = np.zeros((H + 1, S, A))
    for h in range(H - 1, -1, -1):
        q[h] = mdp.reward[h]
        if h < H - 1:
            q[h] = q[h] + mdp.kernel[h] @ v[h + 1]
        v[h] = np.sum(q[h] * pol.action_dist[h], axis=1)
    return ValueTable(v=v, q=q)


def multi_step_kernel(
    mdp: TabularMdp, h_from: int, s: int, actions: Sequence[int]
) -> np.ndarray:
    """
    Distribution of the state reached from ``s`` at step ``h_from`` after
    playing ``actions`` one per step.

    Raises:
        HorizonError: if the sequence needs a kernel beyond the last step
    """
    if h_from < 0 or h_from + len(actions) > mdp.horizon - 1:
        raise HorizonError(
            f"action sequence of length {len(actions)} from step {h_from} "
            f"runs past horizon {mdp.horizon}"
        )
    dist = np.zeros(mdp.num_states)
    dist[s] = 1.0
    return push_forward(mdp, h_from, dist, actions)


def push_forward(
    mdp: TabularMdp, h_from: int, dist: np.ndarray, actions: Sequence[int]
) -> np.ndarray:
    """Push a state distribution through the kernels along a fixed action sequence."""
    out = np.asarray(dist, dtype=float)
    for offset, a in enumerate(actions):
        out = out @ mdp.kernel[h_from + offset, :, int(a), :]
    return out


def state_occupancy(mdp: TabularMdp, pol: MarkovPolicy) -> np.ndarray:
    """Forward recursion for the step-wise state distribution ``(H, S)`` under ``pol``."""
    _check_policy(mdp, pol)
    H, S = mdp.horizon, mdp.num_states
    occ = np.zeros((H, S))
    occ[0] = mdp.initial_dist
    for h in range(H - 1):
        joint = occ[h][:, None] * pol.action_dist[h]
        occ[h + 1] = np.einsum("sa,sat->t", joint, mdp.kernel[h])
    return occ
