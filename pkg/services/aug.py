"""
Augmented MDPs over observable histories.

Three variants are built here: ``delayed-expected`` (H layers, reward is the
belief-expected reward), ``delayed-past`` (2H layers, reward of a step is paid
once when its observation arrives) and ``missing`` (H layers, lossy channel).
Ground-truth builders enumerate only successors with positive probability;
the skeleton builders used by learners keep every structurally possible
successor so that estimated weights can be written into a fixed structure.
"""
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import AUG_STATE_CAP
from models.aug import (
    MODE_ABSORB,
    MODE_FORCED,
    MODE_HAZARD,
    MODE_INITIAL,
    MODE_MISSING,
    MODE_PRE_ARRIVAL,
    MODE_TERMINAL,
    AugLayer,
    AugMdp,
    AugState,
    AugValues,
    AugVariant,
    Belief,
    ExecutablePolicy,
)
from models.channels import NOTHING_VISIBLE, DelayModel, MissingModel
from models.errors import AugStateCapError, InconsistentAugStateError, StalenessUnreachableError
from models.mdp import MarkovPolicy, TabularMdp
from services.mdp_core import multi_step_kernel, push_forward
from utils.logger import logger

TAIL_TOL = 1e-15

# (arrival weights over S, weight of the "nothing new" successor)
Weights = Tuple[np.ndarray, float]
WeighFn = Callable[[int, AugState, int, int], Weights]
RewardFn = Callable[[int, AugState], np.ndarray]


def theta_delay(model: DelayModel, s: int, a: int, delta: int, step: int = 0) -> float:
    """
    Hazard rate ``P(Δ=δ) / P(Δ≥δ)`` of the inter-arrival pmf at ``(step, s, a)``.

    Raises:
        StalenessUnreachableError: if ``P(Δ≥δ)`` is zero
    """
    pmf = model.pmf[step, s, a]
    if delta < 0 or delta > model.max_delay:
        raise StalenessUnreachableError(
            f"staleness unreachable: δ={delta} outside [0, {model.max_delay}]"
        )
    tail = float(pmf[delta:].sum())
    if tail <= TAIL_TOL:
        raise StalenessUnreachableError(
            f"staleness unreachable: P(Δ≥{delta}) = 0 at (h={step}, s={s}, a={a})"
        )
    return min(1.0, float(pmf[delta]) / tail)


def hazard_table(pmf: np.ndarray) -> np.ndarray:
    """Hazard rates for a whole ``(..., Δ)`` pmf array; unreachable staleness maps to 1."""
    tails = np.cumsum(pmf[..., ::-1], axis=-1)[..., ::-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        hazard = np.where(tails > TAIL_TOL, pmf / np.where(tails > TAIL_TOL, tails, 1.0), 1.0)
    return np.clip(hazard, 0.0, 1.0)


def origin_step(tau: AugState, h: int, base_horizon: int) -> int:
    """Step of the last seen state; windows stop growing at the base horizon."""
    if tau.last_seen is None:
        return NOTHING_VISIBLE
    return min(h, base_horizon) - len(tau.window)


def head_action(tau: AugState, a: int) -> int:
    """Action played at the origin step."""
    return tau.window[0] if tau.window else a


def belief(mdp: TabularMdp, tau: AugState, h: int) -> Belief:
    """
    Distribution of the latent state ``s_h`` given ``τ``.

    The last seen state (or the initial distribution, before anything arrived)
    is pushed through the kernels along the action window.

    Raises:
        InconsistentAugStateError: if ``τ`` cannot occur at step ``h``
    """
    H = mdp.horizon
    if not 0 <= h < H:
        raise InconsistentAugStateError(f"step {h} outside [0, {H})")
    if tau.staleness < 0:
        raise InconsistentAugStateError(f"negative staleness in {tau}")
    if tau.last_seen is None:
        if len(tau.window) != h:
            raise InconsistentAugStateError(
                f"window length {len(tau.window)} of {tau} does not match step {h}"
            )
        return push_forward(mdp, 0, mdp.initial_dist, tau.window)
    origin = h - len(tau.window)
    if origin < 0 or tau.staleness > len(tau.window):
        raise InconsistentAugStateError(f"{tau} is inconsistent with step {h}")
    return multi_step_kernel(mdp, origin, tau.last_seen, tau.window)


def delayed_mode(
    variant: AugVariant, tau: AugState, h: int, base_horizon: int, initial_delay: int
) -> int:
    num_layers = 2 * base_horizon if variant == "delayed-past" else base_horizon
    if h >= num_layers - 1:
        return MODE_TERMINAL
    if tau.last_seen is None:
        return MODE_INITIAL if h + 1 == initial_delay else MODE_PRE_ARRIVAL
    if variant == "delayed-past":
        if origin_step(tau, h, base_horizon) == base_horizon - 1:
            return MODE_ABSORB
        if h >= base_horizon - 1:
            return MODE_FORCED
    return MODE_HAZARD


def _next_states(
    variant: AugVariant,
    mode: int,
    tau: AugState,
    h: int,
    a: int,
    base_horizon: int,
    num_states: int,
) -> Tuple[Optional[List[AugState]], Optional[AugState]]:
    """Arrival successors (one per revealed state) and the "nothing new" successor."""
    grown = tau.window + (a,) if h < base_horizon else tau.window
    if mode == MODE_TERMINAL:
        return None, None
    if mode == MODE_MISSING:
        arrivals = [AugState(s, (), 0) for s in range(num_states)]
        return arrivals, AugState(tau.last_seen, grown, len(grown))
    if mode == MODE_HAZARD:
        arrivals = [AugState(s, grown[1:], 0) for s in range(num_states)]
        return arrivals, AugState(tau.last_seen, grown, tau.staleness + 1)
    if mode == MODE_FORCED:
        return [AugState(s, grown[1:], 0) for s in range(num_states)], None
    if mode == MODE_ABSORB:
        return None, AugState(tau.last_seen, grown, 1)
    if mode == MODE_INITIAL:
        return [AugState(s, grown, 0) for s in range(num_states)], None
    return None, AugState(None, grown, tau.staleness + 1)


def cardinality_bound(base_horizon: int, num_states: int, num_actions: int) -> int:
    """
    Upper bound on the number of augmented states over all 2H layers.

    Each layer holds at most ``(S+1)`` last-seen values, ``H+1`` staleness values
    and ``Σ_{k≤H} A^k ≤ (H+1)·A^H`` windows.
    """
    H, S, A = base_horizon, num_states, num_actions
    return 2 * H * (S + 1) * (H + 1) ** 2 * A**H


def _enumerate(
    variant: AugVariant,
    base_horizon: int,
    num_states: int,
    num_actions: int,
    roots: Sequence[Tuple[AugState, float]],
    mode_of: Callable[[AugState, int], int],
    weigh: WeighFn,
    keep_zero: bool,
    cap: int,
) -> Tuple[List[AugLayer], np.ndarray]:
    S, A = num_states, num_actions
    num_layers = 2 * base_horizon if variant == "delayed-past" else base_horizon
    current = [tau for tau, _ in roots]
    parents = [(-1, -1)] * len(current)
    layers: List[AugLayer] = []
    total = 0
    for h in range(num_layers):
        n = len(current)
        total += n * A
        if total > cap:
            raise AugStateCapError(
                f"augmented layer {h} has {n} states; {total} state-actions exceed cap {cap}"
            )
        successors = np.full((n, A, S + 1), -1, dtype=np.int64)
        probs = np.zeros((n, A, S + 1))
        modes = np.zeros(n, dtype=np.int64)
        heads = np.zeros((n, A), dtype=np.int64)
        next_index: Dict[AugState, int] = {}
        next_states: List[AugState] = []
        next_parents: List[Tuple[int, int]] = []

        def intern(state: AugState, parent: Tuple[int, int]) -> int:
            j = next_index.get(state)
            if j is None:
                j = len(next_states)
                next_index[state] = j
                next_states.append(state)
                next_parents.append(parent)
            return j

        for i, tau in enumerate(current):
            mode = mode_of(tau, h)
            modes[i] = mode
            for a in range(A):
                heads[i, a] = head_action(tau, a)
                if mode == MODE_TERMINAL:
                    continue
                arrivals, stay = _next_states(variant, mode, tau, h, a, base_horizon, S)
                arrival_w, stay_w = weigh(h, tau, a, mode)
                if arrivals is not None:
                    for k, nxt in enumerate(arrivals):
                        if keep_zero or arrival_w[k] > 0.0:
                            successors[i, a, k] = intern(nxt, (-1, -1))
                            probs[i, a, k] = arrival_w[k]
                if stay is not None and (keep_zero or stay_w > 0.0):
                    successors[i, a, S] = intern(stay, (i, a))
                    probs[i, a, S] = stay_w

        layers.append(
            AugLayer(
                states=list(current),
                index={tau: i for i, tau in enumerate(current)},
                successors=successors,
                probs=probs,
                rewards=np.zeros((n, A)),
                last_seen=np.array(
                    [NOTHING_VISIBLE if t.last_seen is None else t.last_seen for t in current],
                    dtype=np.int64,
                ),
                origin=np.array(
                    [origin_step(t, h, base_horizon) for t in current], dtype=np.int64
                ),
                staleness=np.array([t.staleness for t in current], dtype=np.int64),
                head_action=heads,
                mode=modes,
                parent=np.array([p for p, _ in parents], dtype=np.int64),
                parent_action=np.array([pa for _, pa in parents], dtype=np.int64),
            )
        )
        current, parents = next_states, next_parents

    states_total = sum(layer.size for layer in layers)
    assert states_total <= cardinality_bound(base_horizon, S, A), (
        f"{states_total} augmented states exceed the cardinality bound"
    )
    weights = np.array([w for _, w in roots], dtype=float)
    return layers, weights


def _roots(initial_dist: np.ndarray, initial_delay: int) -> List[Tuple[AugState, float]]:
    if initial_delay > 0:
        return [(AugState(None, (), 0), 1.0)]
    return [(AugState(int(s), (), 0), float(p)) for s, p in enumerate(initial_dist) if p > 0.0]


def _attach(
    layers: List[AugLayer],
    reward_fn: RewardFn,
    mdp: Optional[TabularMdp] = None,
) -> None:
    for h, layer in enumerate(layers):
        if layer.size:
            layer.rewards = np.stack([reward_fn(h, tau) for tau in layer.states])
        if mdp is not None and h < mdp.horizon:
            layer.beliefs = np.stack([belief(mdp, tau, h) for tau in layer.states]) \
                if layer.size else np.zeros((0, mdp.num_states))


def _truth_weights(
    mdp: TabularMdp, model: DelayModel | MissingModel, base_horizon: int
) -> WeighFn:
    S = mdp.num_states

    def weigh(h: int, tau: AugState, a: int, mode: int) -> Weights:
        if mode in (MODE_ABSORB, MODE_PRE_ARRIVAL):
            return np.zeros(S), 1.0
        if mode == MODE_INITIAL:
            return np.asarray(mdp.initial_dist), 0.0
        t = origin_step(tau, h, base_horizon)
        if mode == MODE_MISSING:
            lam = float(model.rates[h + 1])
            arrival = multi_step_kernel(mdp, t, tau.last_seen, tau.window + (a,))
            return lam * arrival, 1.0 - lam
        head = head_action(tau, a)
        kernel_row = mdp.kernel[t, tau.last_seen, head]
        if mode == MODE_FORCED:
            return np.asarray(kernel_row), 0.0
        theta = theta_delay(model, tau.last_seen, head, tau.staleness, step=t)
        return theta * kernel_row, 1.0 - theta

    return weigh


def expected_reward_fn(mdp: TabularMdp) -> RewardFn:
    """``r_aug(τ, ·) = Σ_s b(s|τ) r_h(s, ·)``."""
    return lambda h, tau: belief(mdp, tau, h) @ mdp.reward[h]


def past_reward_fn(reward: np.ndarray) -> RewardFn:
    """Reward of the origin step, paid once at the layer where its observation arrives."""
    H, _, A = reward.shape

    def fn(h: int, tau: AugState) -> np.ndarray:
        out = np.zeros(A)
        t = origin_step(tau, h, H)
        if tau.last_seen is None or tau.staleness != 0 or not 0 <= t <= H - 1:
            return out
        for a in range(A):
            out[a] = reward[t, tau.last_seen, head_action(tau, a)]
        return out

    return fn


def _cap(cap: Optional[int]) -> int:
    return cap if cap is not None else AUG_STATE_CAP


def _log_built(aug: AugMdp, what: str, cap: Optional[int]) -> None:
    size = aug.num_state_actions()
    logger.info(
        f"Built {what} {aug.variant} augmented MDP: {aug.horizon} layers, "
        f"{size} state-actions, sizes {aug.layer_sizes()}"
    )
    if size > 0.8 * _cap(cap):
        logger.warning(f"{what} augmented MDP uses {size} of {_cap(cap)} allowed state-actions")


def _build_delayed(
    mdp: TabularMdp, model: DelayModel, variant: AugVariant, cap: Optional[int]
) -> AugMdp:
    H, S, A = mdp.horizon, mdp.num_states, mdp.num_actions
    if model.horizon != H:
        raise InconsistentAugStateError(
            f"delay model horizon {model.horizon} differs from MDP horizon {H}"
        )
    layers, weights = _enumerate(
        variant,
        H,
        S,
        A,
        _roots(mdp.initial_dist, model.initial_delay),
        lambda tau, h: delayed_mode(variant, tau, h, H, model.initial_delay),
        _truth_weights(mdp, model, H),
        keep_zero=False,
        cap=_cap(cap),
    )
    reward_fn = past_reward_fn(mdp.reward) if variant == "delayed-past" else expected_reward_fn(mdp)
    _attach(layers, reward_fn, mdp)
    aug = AugMdp(
        variant=variant,
        base_horizon=H,
        num_states=S,
        num_actions=A,
        layers=layers,
        root_weights=weights,
        initial_delay=model.initial_delay,
    )
    _log_built(aug, "ground-truth", cap)
    return aug


def build_delayed_aug(mdp: TabularMdp, model: DelayModel, cap: Optional[int] = None) -> AugMdp:
    """Delayed augmented MDP with the belief-expected reward over H layers."""
    return _build_delayed(mdp, model, "delayed-expected", cap)


def build_delayed_aug_past(
    mdp: TabularMdp, model: DelayModel, cap: Optional[int] = None
) -> AugMdp:
    """Delayed augmented MDP over 2H layers paying each step's reward when it arrives."""
    return _build_delayed(mdp, model, "delayed-past", cap)


def build_missing_aug(mdp: TabularMdp, model: MissingModel, cap: Optional[int] = None) -> AugMdp:
    """Missing-observation augmented MDP; the step-h transition survives with ``rates[h+1]``."""
    H, S, A = mdp.horizon, mdp.num_states, mdp.num_actions
    if model.horizon != H:
        raise InconsistentAugStateError(
            f"observation model horizon {model.horizon} differs from MDP horizon {H}"
        )
    layers, weights = _enumerate(
        "missing",
        H,
        S,
        A,
        _roots(mdp.initial_dist, 0),
        lambda tau, h: MODE_TERMINAL if h == H - 1 else MODE_MISSING,
        _truth_weights(mdp, model, H),
        keep_zero=False,
        cap=_cap(cap),
    )
    _attach(layers, expected_reward_fn(mdp), mdp)
    aug = AugMdp(
        variant="missing",
        base_horizon=H,
        num_states=S,
        num_actions=A,
        layers=layers,
        root_weights=weights,
    )
    _log_built(aug, "ground-truth", cap)
    return aug


def _no_weights(num_states: int) -> WeighFn:
    zeros = np.zeros(num_states)
    return lambda h, tau, a, mode: (zeros, 0.0)


def delayed_skeleton(
    reward: np.ndarray,
    initial_dist: np.ndarray,
    initial_delay: int,
    cap: Optional[int] = None,
) -> AugMdp:
    """
    Structure of the 2H-layer past-reward augmented MDP without transition weights.

    Only the reward table, the initial distribution and the first delay are
    needed: those are known to the learner.
    """
    H, S, A = reward.shape
    variant: AugVariant = "delayed-past"
    layers, weights = _enumerate(
        variant,
        H,
        S,
        A,
        _roots(np.asarray(initial_dist), initial_delay),
        lambda tau, h: delayed_mode(variant, tau, h, H, initial_delay),
        _no_weights(S),
        keep_zero=True,
        cap=_cap(cap),
    )
    _attach(layers, past_reward_fn(np.asarray(reward)))
    aug = AugMdp(
        variant=variant,
        base_horizon=H,
        num_states=S,
        num_actions=A,
        layers=layers,
        root_weights=weights,
        initial_delay=initial_delay,
    )
    _log_built(aug, "skeleton", cap)
    return aug


def missing_skeleton(
    num_states: int,
    num_actions: int,
    horizon: int,
    initial_dist: np.ndarray,
    cap: Optional[int] = None,
) -> AugMdp:
    """Structure of the missing-observation augmented MDP with zero weights and rewards."""
    H = horizon
    layers, weights = _enumerate(
        "missing",
        H,
        num_states,
        num_actions,
        _roots(np.asarray(initial_dist), 0),
        lambda tau, h: MODE_TERMINAL if h == H - 1 else MODE_MISSING,
        _no_weights(num_states),
        keep_zero=True,
        cap=_cap(cap),
    )
    aug = AugMdp(
        variant="missing",
        base_horizon=H,
        num_states=num_states,
        num_actions=num_actions,
        layers=layers,
        root_weights=weights,
    )
    _log_built(aug, "skeleton", cap)
    return aug


def reweight_delayed(
    skeleton: AugMdp,
    kernel: np.ndarray,
    hazard: np.ndarray,
    initial_dist: np.ndarray,
) -> AugMdp:
    """
    Write a (possibly estimated) kernel and hazard table into a delayed skeleton.

    Args:
        skeleton: Output of ``delayed_skeleton``
        kernel: ``(H-1, S, A, S)`` transition table
        hazard: ``(H, S, A, H+1)`` arrival hazard rates
        initial_dist: Distribution of the first state

    Returns:
        AugMdp sharing the skeleton's states and successors
    """
    S = skeleton.num_states
    probs: List[np.ndarray] = []
    for layer in skeleton.layers:
        out = np.zeros_like(layer.probs)
        mode = layer.mode
        rows = np.flatnonzero((mode == MODE_HAZARD) | (mode == MODE_FORCED))
        if rows.size:
            t = layer.origin[rows][:, None]
            s = layer.last_seen[rows][:, None]
            heads = layer.head_action[rows]
            kern = kernel[t, s, heads]
            theta = np.where(
                (mode[rows] == MODE_HAZARD)[:, None],
                hazard[t, s, heads, layer.staleness[rows][:, None]],
                1.0,
            )
            out[rows, :, :S] = theta[..., None] * kern
            out[rows, :, S] = 1.0 - theta
        initial = mode == MODE_INITIAL
        out[initial, :, :S] = initial_dist
        waiting = (mode == MODE_ABSORB) | (mode == MODE_PRE_ARRIVAL)
        out[waiting, :, S] = 1.0
        out[layer.successors < 0] = 0.0
        probs.append(out)
    return skeleton.reweighted(probs, [layer.rewards for layer in skeleton.layers])


def reweight_missing(
    skeleton: AugMdp,
    arrival: Sequence[np.ndarray],
    rates: np.ndarray,
    rewards: Sequence[np.ndarray],
) -> AugMdp:
    """
    Write per-(τ, a) arrival distributions and observation rates into a missing skeleton.

    ``arrival[h]`` is ``(n_h, A, S)``: the distribution of ``s_{h+1}`` given
    ``(τ, a)``; the transition out of step h survives with ``rates[h+1]``.
    """
    S = skeleton.num_states
    H = skeleton.base_horizon
    probs: List[np.ndarray] = []
    for h, layer in enumerate(skeleton.layers):
        out = np.zeros_like(layer.probs)
        if h < H - 1 and layer.size:
            lam = float(rates[h + 1])
            out[:, :, :S] = lam * arrival[h]
            out[:, :, S] = 1.0 - lam
            out[layer.successors < 0] = 0.0
        probs.append(out)
    return skeleton.reweighted(probs, rewards)


def backup(layer: AugLayer, v_next: Optional[np.ndarray]) -> np.ndarray:
    """``Q(τ, a) = r(τ, a) + Σ_k p_k(τ, a) V_next(succ_k(τ, a))`` for one layer."""
    q = np.array(layer.rewards, dtype=float)
    if v_next is not None and v_next.size:
        succ = layer.successors
        values = np.where(succ >= 0, v_next[np.maximum(succ, 0)], 0.0)
        q = q + np.sum(layer.probs * values, axis=-1)
    return q


def reward_to_go_caps(
    aug: AugMdp, rewards: Optional[Sequence[np.ndarray]] = None
) -> List[np.ndarray]:
    """
    Per-layer ``(n, A)`` bounds on ``Q(τ, a)`` that hold for every choice of weights.

    A pair is worth at most its reward plus the best bound among the
    successors present in the structure. On a skeleton this is the reward
    still payable from ``τ``: the pending steps of a delayed window, the
    remaining steps of a missing-observation episode.

    Args:
        aug: Augmented MDP or skeleton
        rewards: Per-layer reward upper bounds, defaults to the layer rewards
    """
    bounds = rewards if rewards is not None else [layer.rewards for layer in aug.layers]
    caps: List[np.ndarray] = [np.zeros(0)] * aug.horizon
    v_next: Optional[np.ndarray] = None
    for h in range(aug.horizon - 1, -1, -1):
        layer = aug.layers[h]
        cap = np.array(bounds[h], dtype=float)
        if v_next is not None and v_next.size and layer.size:
            succ = layer.successors
            best = np.where(succ >= 0, v_next[np.maximum(succ, 0)], -np.inf).max(axis=-1)
            cap = cap + np.where(np.isfinite(best), best, 0.0)
        caps[h] = cap
        v_next = cap.max(axis=1) if layer.size else np.zeros(0)
    return caps


def step_reward_bounds(reward: np.ndarray, aug: AugMdp) -> List[np.ndarray]:
    """
    Largest step reward each pair of an H-layer MDP can pay: ``r_h(s, a)`` where
    ``s`` was just observed, ``max_s r_h(s, a)`` otherwise.
    """
    out: List[np.ndarray] = []
    for h, layer in enumerate(aug.layers):
        bound = np.tile(reward[h].max(axis=0), (layer.size, 1))
        seen = (layer.parent < 0) & (layer.last_seen >= 0)
        bound[seen] = reward[h, layer.last_seen[seen]]
        out.append(bound)
    return out


def evaluate_aug(aug: AugMdp, pol: ExecutablePolicy) -> AugValues:
    """
    Exact backward-induction value of an executable policy.

    Raises:
        PolicyCoverageError: if the policy misses a reachable augmented state
    """
    v: List[np.ndarray] = [np.zeros(0)] * aug.horizon
    q: List[np.ndarray] = [np.zeros(0)] * aug.horizon
    v_next: Optional[np.ndarray] = None
    for h in range(aug.horizon - 1, -1, -1):
        layer = aug.layers[h]
        q[h] = backup(layer, v_next)
        v[h] = np.sum(pol.matrix(h, layer.states) * q[h], axis=1) if layer.size else np.zeros(0)
        v_next = v[h]
    return AugValues(v=v, q=q, root_weights=aug.root_weights)


def optimal_aug(aug: AugMdp) -> Tuple[ExecutablePolicy, AugValues]:
    """Optimal executable policy by backward induction; ties go to the lowest action."""
    v: List[np.ndarray] = [np.zeros(0)] * aug.horizon
    q: List[np.ndarray] = [np.zeros(0)] * aug.horizon
    actions: List[np.ndarray] = [np.zeros(0, dtype=int)] * aug.horizon
    v_next: Optional[np.ndarray] = None
    for h in range(aug.horizon - 1, -1, -1):
        q[h] = backup(aug.layers[h], v_next)
        actions[h] = np.argmax(q[h], axis=1) if q[h].size else np.zeros(0, dtype=int)
        v[h] = q[h].max(axis=1) if q[h].size else np.zeros(0)
        v_next = v[h]
    values = AugValues(v=v, q=q, root_weights=aug.root_weights)
    return ExecutablePolicy.from_actions(aug, actions), values


def lift_markov(aug: AugMdp, pol: MarkovPolicy) -> ExecutablePolicy:
    """
    Lift a Markov policy onto an augmented MDP whose states are all fully observed.

    Raises:
        InconsistentAugStateError: if some augmented state carries a non-empty window
    """
    layers = []
    for h, layer in enumerate(aug.layers):
        table = {}
        for tau in layer.states:
            if tau.window or tau.last_seen is None:
                raise InconsistentAugStateError(
                    f"cannot lift a Markov policy onto {tau} at step {h}"
                )
            table[tau] = pol.action_dist[h, tau.last_seen]
        layers.append(table)
    return ExecutablePolicy(layers, aug.num_actions)


def dump_aug_json(aug: AugMdp) -> Dict:
    """Plain-data view of an augmented MDP for debugging and golden files."""
    S = aug.num_states
    layers = []
    for h, layer in enumerate(aug.layers):
        transitions = []
        for i in range(layer.size):
            per_action = []
            for a in range(aug.num_actions):
                per_action.append(
                    [
                        {"slot": "stay" if k == S else k, "next": int(j), "prob": float(p)}
                        for k, (j, p) in enumerate(zip(layer.successors[i, a], layer.probs[i, a]))
                        if j >= 0
                    ]
                )
            transitions.append(per_action)
        layers.append(
            {
                "step": h,
                "states": [
                    {
                        "last_seen": tau.last_seen,
                        "window": list(tau.window),
                        "staleness": tau.staleness,
                    }
                    for tau in layer.states
                ],
                "rewards": layer.rewards.tolist(),
                "transitions": transitions,
            }
        )
    return {
        "variant": aug.variant,
        "base_horizon": aug.base_horizon,
        "num_states": aug.num_states,
        "num_actions": aug.num_actions,
        "initial_delay": aug.initial_delay,
        "root_weights": aug.root_weights.tolist(),
        "layers": layers,
    }
