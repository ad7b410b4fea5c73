"""Optimistic planners: bonus-driven value iteration and extended value iteration."""
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from models.aug import AugMdp, AugState, AugValues, ExecutablePolicy
from services.aug import backup

# One clipping level for every Q value, or per-layer ``(n, A)`` levels
Cap = Union[float, Sequence[np.ndarray]]


def _level(cap: Cap, h: int) -> Union[float, np.ndarray]:
    return float(cap) if isinstance(cap, (int, float)) else cap[h]


def optimistic_vi(
    aug: AugMdp, bonus: Sequence[np.ndarray], cap: Cap
) -> Tuple[ExecutablePolicy, AugValues]:
    """
    Backward induction with ``Q = min(cap, r + b + PV)`` and a greedy policy.

    Args:
        aug: Augmented MDP built from the current estimates
        bonus: Per-layer ``(n, A)`` exploration bonuses
        cap: Clipping level, a scalar such as ``H`` or per-layer ``(n, A)`` bounds

    Returns:
        Greedy executable policy (lowest action on ties) and the optimistic values
    """
    v: List[np.ndarray] = [np.zeros(0)] * aug.horizon
    q: List[np.ndarray] = [np.zeros(0)] * aug.horizon
    actions: List[np.ndarray] = [np.zeros(0, dtype=int)] * aug.horizon
    v_next: Optional[np.ndarray] = None
    for h in range(aug.horizon - 1, -1, -1):
        q[h] = np.minimum(_level(cap, h), backup(aug.layers[h], v_next) + bonus[h])
        actions[h] = np.argmax(q[h], axis=1) if q[h].size else np.zeros(0, dtype=int)
        v[h] = q[h].max(axis=1) if q[h].size else np.zeros(0)
        v_next = v[h]
    values = AugValues(v=v, q=q, root_weights=aug.root_weights)
    return ExecutablePolicy.from_actions(aug, actions), values


def inner_max(p: np.ndarray, radius: np.ndarray, value: np.ndarray) -> np.ndarray:
    """
    Maximize ``<q, value>`` over ``q`` in the L1 ball of ``radius`` around ``p`` on the simplex.

    Mass ``radius/2`` moves onto the highest-value state and is taken back from
    the lowest-value states first.

    Args:
        p: ``(..., S)`` center distributions
        radius: ``(...)`` L1 radii
        value: ``(S,)`` values shared by every row

    Returns:
        ``(...)`` maximal scalar products
    """
    order = list(np.argsort(value, kind="stable"))
    best = order.pop()
    p_max = np.array(p, dtype=float, copy=True)
    p_max[..., best] = np.minimum(1.0, p[..., best] + np.asarray(radius) / 2.0)
    while order and (np.sum(p_max, axis=-1) > 1.0).any():
        idx = order.pop(0)
        others = np.sum(p_max, axis=-1) - p_max[..., idx]
        p_max[..., idx] = np.clip(1.0 - others, 0.0, p_max[..., idx])
    return p_max @ value


def extended_vi_missing(
    skeleton: AugMdp,
    reward: np.ndarray,
    kernel: np.ndarray,
    radius: np.ndarray,
    rates: np.ndarray,
    cap: Cap,
) -> Tuple[ExecutablePolicy, AugValues]:
    """
    Optimistic planning over the kernel confidence set for the missing-observation setting.

    Every one-step kernel row may move anywhere inside its L1 ball; the
    optimistic choice is made independently at every step of the action window
    between the last observed state and the next arrival.

    Args:
        skeleton: Missing-variant skeleton
        reward: ``(H, S, A)`` known rewards
        kernel: ``(H-1, S, A, S)`` kernel estimate, the ball centers
        radius: ``(H-1, S, A)`` L1 radii
        rates: ``(H,)`` observation rates, known to the planner
        cap: Clipping level, scalar or per layer as in ``optimistic_vi``
    """
    H, S, A = reward.shape
    v: List[np.ndarray] = [np.zeros(0)] * skeleton.horizon
    q: List[np.ndarray] = [np.zeros(0)] * skeleton.horizon
    actions: List[np.ndarray] = [np.zeros(0, dtype=int)] * skeleton.horizon
    v_next: Optional[np.ndarray] = None
    for h in range(skeleton.horizon - 1, -1, -1):
        layer = skeleton.layers[h]
        if h == H - 1:
            terminal = reward[h]
            stay_weight = 0.0
            v_stay = np.zeros((layer.size, A))
        else:
            lam = float(rates[h + 1])
            following = skeleton.layers[h + 1]
            arrival_idx = np.array([following.index[AugState(s, (), 0)] for s in range(S)])
            terminal = reward[h] + lam * inner_max(kernel[h], radius[h], v_next[arrival_idx])
            stay_weight = 1.0 - lam
            succ = layer.successors[:, :, S]
            v_stay = np.where(succ >= 0, v_next[np.maximum(succ, 0)], 0.0)

        memo: Dict[Tuple[int, Tuple[int, ...]], np.ndarray] = {}

        def chained(a: int, window: Tuple[int, ...]) -> np.ndarray:
            key = (a, window)
            if key not in memo:
                f = terminal[:, a]
                origin = h - len(window)
                for j in range(len(window) - 1, -1, -1):
                    step, a_j = origin + j, window[j]
                    f = inner_max(kernel[step, :, a_j], radius[step, :, a_j], f)
                memo[key] = f
            return memo[key]

        q_h = np.zeros((layer.size, A))
        for i, tau in enumerate(layer.states):
            for a in range(A):
                q_h[i, a] = chained(a, tau.window)[tau.last_seen]
        q[h] = np.minimum(_level(cap, h), q_h + stay_weight * v_stay)
        actions[h] = np.argmax(q[h], axis=1) if q[h].size else np.zeros(0, dtype=int)
        v[h] = q[h].max(axis=1) if q[h].size else np.zeros(0)
        v_next = v[h]
    values = AugValues(v=v, q=q, root_weights=skeleton.root_weights)
    return ExecutablePolicy.from_actions(skeleton, actions), values
