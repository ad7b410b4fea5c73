"""Counters, plug-in estimates and exploration bonuses used by the learners."""
from typing import List

import numpy as np

from models.aug import MODE_FORCED, MODE_HAZARD, AugMdp, AugState
from models.episode import EpisodeRecord
from models.learner import BonusConfig, Counts
from services.aug import delayed_mode, head_action, origin_step


def _uniform_rows(counts: np.ndarray) -> np.ndarray:
    """Normalize the last axis; all-zero rows become uniform."""
    totals = counts.sum(axis=-1, keepdims=True)
    size = counts.shape[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(totals > 0, counts / np.where(totals > 0, totals, 1), 1.0 / size)


def update_delayed(counts: Counts, record: EpisodeRecord) -> None:
    """Fold one episode's returned data (available after the end-of-episode flush)."""
    states = record.observed_states()
    if any(s is None for s in states):
        raise ValueError("delayed episodes must return every observation")
    H = record.horizon
    for h in range(H):
        s, a = int(states[h]), int(record.actions[h])
        counts.visits[h, s, a] += 1
        if h < H - 1:
            counts.transitions[h, s, a, int(states[h + 1])] += 1
        if record.inter_arrivals is not None:
            delta = min(int(record.inter_arrivals[h]), counts.inter_arrivals.shape[-1] - 1)
            counts.inter_arrivals[h, s, a, delta] += 1
    counts.episodes += 1


def update_missing(counts: Counts, record: EpisodeRecord, skeleton: AugMdp) -> None:
    """
    Fold one missing-observation episode.

    One-step and augmented transition counters move only when the next state
    was observed; the last layer's augmented visit counter moves on every visit.
    """
    states = record.observed_states()
    H = record.horizon
    for h in range(H):
        a = int(record.actions[h])
        i = skeleton.layers[h].index[record.agent_states[h]]
        if states[h] is None:
            counts.missing[h] += 1
        if h == H - 1:
            counts.aug_visits[h][i, a] += 1
            continue
        nxt = states[h + 1]
        if nxt is None:
            continue
        counts.aug_visits[h][i, a] += 1
        counts.aug_transitions[h][i, a, nxt] += 1
        if states[h] is not None:
            counts.visits[h, states[h], a] += 1
            counts.transitions[h, states[h], a, nxt] += 1
    counts.episodes += 1


def estimate_delayed(counts: Counts) -> tuple[np.ndarray, np.ndarray]:
    """
    Plug-in kernel and arrival-hazard estimates.

    Returns:
        ``p̂`` of shape ``(H-1, S, A, S)`` (uniform where unvisited) and
        ``θ̂`` of shape ``(H, S, A, H+1)`` (one where no sample reached δ)
    """
    H = counts.visits.shape[0]
    kernel = _uniform_rows(counts.transitions[: H - 1].astype(float))
    arrivals = counts.inter_arrivals.astype(float)
    tails = hazard_sample_sizes(counts).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        hazard = np.where(tails > 0, arrivals / np.where(tails > 0, tails, 1.0), 1.0)
    return kernel, hazard


def hazard_sample_sizes(counts: Counts) -> np.ndarray:
    """``N(s, a, δ) = Σ_{δ'≥δ} N(s, a, δ')``: samples informing the hazard at δ."""
    arrivals = counts.inter_arrivals
    return np.cumsum(arrivals[..., ::-1], axis=-1)[..., ::-1]


def _hoeffding(cfg: BonusConfig, n: np.ndarray | float) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(n > 0, np.sqrt(cfg.horizon * cfg.iota / np.where(n > 0, n, 1.0)), np.inf)


def bonus_delayed(counts: Counts, cfg: BonusConfig, tau: AugState, a: int, h: int) -> float:
    """
    ``cH(√(Hι/N(s_t,a_t,δ)) + √(Hι/N(s_t,a_t)))`` for the augmented state ``τ`` at
    step ``h``.

    Zero before the first arrival and once nothing is left to arrive; ``H``
    (the clipping level) when a needed count is zero. Once the episode is over
    the arrival is certain and only the kernel term remains.
    """
    H = cfg.horizon
    mode = delayed_mode("delayed-past", tau, h, H, 0)
    if tau.last_seen is None or mode not in (MODE_HAZARD, MODE_FORCED):
        return 0.0
    t = origin_step(tau, h, H)
    head = head_action(tau, a)
    n_sa = counts.visits[t, tau.last_seen, head]
    n_delta = hazard_sample_sizes(counts)[t, tau.last_seen, head, tau.staleness]
    if n_sa == 0 or (mode == MODE_HAZARD and n_delta == 0):
        return float(H)
    hazard_term = _hoeffding(cfg, n_delta) if mode == MODE_HAZARD else 0.0
    return float(cfg.c * H * (hazard_term + _hoeffding(cfg, n_sa)))


def delayed_bonus_layers(skeleton: AugMdp, counts: Counts, cfg: BonusConfig) -> List[np.ndarray]:
    """
    Per-layer ``(n, A)`` bonuses for a delayed skeleton.

    Rows that only wait for the flush use the kernel term alone since their
    arrival is certain.
    """
    H = cfg.horizon
    tails = hazard_sample_sizes(counts)
    bonuses: List[np.ndarray] = []
    for layer in skeleton.layers:
        out = np.zeros((layer.size, skeleton.num_actions))
        rows = np.flatnonzero((layer.mode == MODE_HAZARD) | (layer.mode == MODE_FORCED))
        if rows.size:
            t = layer.origin[rows][:, None]
            s = layer.last_seen[rows][:, None]
            heads = layer.head_action[rows]
            n_sa = counts.visits[t, s, heads]
            kernel_term = _hoeffding(cfg, n_sa)
            hazard_term = np.where(
                (layer.mode[rows] == MODE_HAZARD)[:, None],
                _hoeffding(cfg, tails[t, s, heads, layer.staleness[rows][:, None]]),
                0.0,
            )
            raw = cfg.c * H * (kernel_term + hazard_term)
            out[rows] = np.where(np.isfinite(raw), raw, float(H))
        bonuses.append(out)
    return bonuses


def confidence_set_radius(counts: Counts, cfg: BonusConfig, h: int, s: int, a: int) -> float:
    """L1 radius ``c√(Sι/N)`` of the kernel confidence set; 2 (the whole simplex) if N=0."""
    return float(radius_table(counts, cfg)[h, s, a])


def radius_table(counts: Counts, cfg: BonusConfig) -> np.ndarray:
    H = counts.visits.shape[0]
    n = counts.transitions[: H - 1].sum(axis=-1).astype(float)
    with np.errstate(divide="ignore"):
        radius = np.where(
            n > 0, cfg.c * np.sqrt(cfg.num_states * cfg.iota / np.where(n > 0, n, 1.0)), 2.0
        )
    return np.minimum(radius, 2.0)


def estimate_kernel(counts: Counts) -> np.ndarray:
    """One-step kernel estimate ``(H-1, S, A, S)`` from counts; uniform where unvisited."""
    H = counts.visits.shape[0]
    return _uniform_rows(counts.transitions[: H - 1].astype(float))


def estimate_rates(counts: Counts) -> np.ndarray:
    """Observed fraction per step; 1 before any episode."""
    if counts.missing is None:
        raise ValueError("counts carry no missing-observation tallies")
    if counts.episodes == 0:
        return np.ones_like(counts.missing, dtype=float)
    return 1.0 - counts.missing / counts.episodes


def estimate_aug_kernel(counts: Counts) -> List[np.ndarray]:
    """``p̂(s'|τ, a)`` per layer from augmented counters; uniform where unvisited."""
    return [_uniform_rows(t.astype(float)) for t in counts.aug_transitions]


def aug_beliefs(skeleton: AugMdp, aug_kernel: List[np.ndarray]) -> List[np.ndarray]:
    """
    Estimated latent-state beliefs per layer.

    A state entered by an observation is a point mass; a state entered by a
    missing observation inherits its parent's next-state estimate.
    """
    S = skeleton.num_states
    beliefs: List[np.ndarray] = []
    eye = np.eye(S)
    for h, layer in enumerate(skeleton.layers):
        out = np.zeros((layer.size, S))
        arrived = layer.parent < 0
        out[arrived] = eye[layer.last_seen[arrived]]
        inherited = np.flatnonzero(~arrived)
        if inherited.size:
            parent = layer.parent[inherited], layer.parent_action[inherited]
            out[inherited] = aug_kernel[h - 1][parent]
        beliefs.append(out)
    return beliefs


def belief_rewards(reward: np.ndarray, beliefs: List[np.ndarray]) -> List[np.ndarray]:
    """``r̂_aug(τ, a) = Σ_s b̂(s|τ) r_h(s, a)`` per layer."""
    return [b @ reward[h] for h, b in enumerate(beliefs)]


def missing_bonus_layers(
    skeleton: AugMdp, counts: Counts, cfg: BonusConfig, episode: int
) -> List[np.ndarray]:
    """``cH(√(Hι/N(τ,a)) + √(ι/k))`` per layer; ``H`` where ``N(τ,a)=0`` or before episode 1."""
    H = cfg.horizon
    out: List[np.ndarray] = []
    rate_term = np.sqrt(cfg.iota / episode) if episode > 0 else np.inf
    for h, layer in enumerate(skeleton.layers):
        n = counts.aug_visits[h].astype(float)
        raw = cfg.c * H * (_hoeffding(cfg, n) + rate_term)
        out.append(np.where(np.isfinite(raw), raw, float(H)))
    return out
