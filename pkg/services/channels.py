"""Delay processes and lossy observation channels, with their samplers."""
from typing import Sequence, Tuple

import numpy as np

from models.channels import NOTHING_VISIBLE, ArrivalSchedule, DelayModel, MissingModel
from models.errors import ModelError
from utils.logger import logger

PMF_TOL = 1e-12


def truncate_pmf(pmf: Sequence[float], horizon: int) -> np.ndarray:
    """Fold all inter-arrival mass at ``Δ ≥ H`` into ``Δ = H`` and pad to length ``H+1``."""
    vec = np.asarray(pmf, dtype=float)
    if vec.ndim != 1 or vec.size == 0:
        raise ModelError(f"inter-arrival pmf must be a non-empty vector, got shape {vec.shape}")
    if np.any(vec < 0.0):
        raise ModelError("inter-arrival pmf has negative entries")
    total = vec.sum()
    if abs(total - 1.0) > 1e-9:
        raise ModelError(f"inter-arrival pmf sums to {total:.12g}, expected 1")
    out = np.zeros(horizon + 1)
    head = min(vec.size, horizon)
    out[:head] = vec[:head]
    out[horizon] = vec[horizon:].sum()
    return out / out.sum()


def _broadcast(vec: np.ndarray, horizon: int, num_states: int, num_actions: int) -> np.ndarray:
    return np.broadcast_to(vec, (horizon, num_states, num_actions, horizon + 1)).copy()


def geometric_delay(
    p: float, horizon: int, num_states: int = 1, num_actions: int = 1
) -> DelayModel:
    """
    Geometric inter-arrivals ``P(Δ=δ) = p(1-p)^δ`` with the tail folded into ``Δ = H``.

    Args:
        p: Per-step arrival probability in (0, 1]
        horizon: Episode length H
        num_states: S, the model is state independent
        num_actions: A, the model is action independent

    Raises:
        ModelError: if p is outside (0, 1]
    """
    if not 0.0 < p <= 1.0:
        raise ModelError(f"geometric delay parameter p={p} outside (0, 1]")
    deltas = np.arange(horizon + 1)
    vec = p * (1.0 - p) ** deltas
    vec[horizon] = (1.0 - p) ** horizon
    return DelayModel(
        pmf=_broadcast(vec / vec.sum(), horizon, num_states, num_actions),
        initial_delay=0,
        kind="geometric",
    )


def constant_delay(
    d: int, horizon: int, num_states: int = 1, num_actions: int = 1
) -> DelayModel:
    """Constant delay ``d``: the first observation lags by ``d`` and every later gap is zero."""
    if not 0 <= d < horizon:
        raise ModelError(f"constant delay d={d} must satisfy 0 <= d < H={horizon}")
    vec = np.zeros(horizon + 1)
    vec[0] = 1.0
    return DelayModel(
        pmf=_broadcast(vec, horizon, num_states, num_actions),
        initial_delay=int(d),
        kind="constant",
    )


def table_delay(
    pmf: Sequence,
    horizon: int,
    num_states: int = 1,
    num_actions: int = 1,
    initial_delay: int = 0,
) -> DelayModel:
    """Delay model from a user pmf: one shared vector or a full ``[h][s][a][Δ]`` array."""
    if not 0 <= initial_delay < horizon:
        raise ModelError(f"initial delay {initial_delay} must satisfy 0 <= d < H={horizon}")
    array = np.asarray(pmf, dtype=float)
    if array.ndim == 1:
        table = _broadcast(truncate_pmf(array, horizon), horizon, num_states, num_actions)
    elif array.ndim == 4 and array.shape[:3] == (horizon, num_states, num_actions):
        table = np.zeros((horizon, num_states, num_actions, horizon + 1))
        for idx in np.ndindex(*array.shape[:3]):
            table[idx] = truncate_pmf(array[idx], horizon)
    else:
        raise ModelError(
            f"pmf table shape {array.shape} is neither a vector nor (H, S, A, *) with "
            f"(H, S, A) = {(horizon, num_states, num_actions)}"
        )
    return DelayModel(pmf=table, initial_delay=int(initial_delay), kind="table")


def missing_model(rates: float | Sequence[float], horizon: int) -> MissingModel:
    """
    Observation channel with per-step survival rates.

    Raises:
        ModelError: if a rate is outside (0, 1] or the length does not match H
    """
    if np.ndim(rates) == 0:
        vec = np.full(horizon, float(rates))  # type: ignore[arg-type]
    else:
        vec = np.asarray(rates, dtype=float)
    if vec.shape != (horizon,):
        raise ModelError(f"expected {horizon} observation rates, got {vec.shape[0]}")
    if np.any(vec <= 0.0) or np.any(vec > 1.0):
        raise ModelError(f"observation rates must lie in (0, 1], got {vec.tolist()}")
    return MissingModel(rates=vec)


def validate_delay_model(
    model: DelayModel, horizon: int, num_states: int, num_actions: int
) -> None:
    expected = (horizon, num_states, num_actions, horizon + 1)
    if model.pmf.shape != expected:
        raise ModelError(f"delay pmf shape {model.pmf.shape} does not match {expected}")
    if np.any(model.pmf < 0.0):
        raise ModelError("delay pmf has negative entries")
    sums = model.pmf.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > PMF_TOL):
        bad = tuple(int(i) for i in np.argwhere(np.abs(sums - 1.0) > PMF_TOL)[0])
        raise ModelError(f"delay pmf at (h, s, a) = {bad} sums to {sums[bad]:.12g}")
    if not 0 <= model.initial_delay < horizon:
        raise ModelError(f"initial delay {model.initial_delay} outside [0, H)")


def draw_inter_arrival(
    model: DelayModel, h: int, s: int, a: int, rng: np.random.Generator
) -> int:
    """One draw of ``Δ_h ~ pmf[h][s][a]``."""
    return int(rng.choice(model.max_delay + 1, p=model.pmf[h, s, a]))


def schedule_from_inter_arrivals(
    initial_delay: int, inter_arrivals: Sequence[int]
) -> ArrivalSchedule:
    """Accumulate delays ``d[h+1] = d[h] + Δ[h]`` and derive nearest-visible indices."""
    gaps = np.asarray(inter_arrivals, dtype=int)
    horizon = gaps.size
    delays = np.empty(horizon, dtype=int)
    delays[0] = initial_delay
    if horizon > 1:
        delays[1:] = initial_delay + np.cumsum(gaps[:-1])
    arrival = np.arange(horizon) + delays
    nearest = np.full(horizon, NOTHING_VISIBLE, dtype=int)
    for h in range(horizon):
        seen = np.flatnonzero(arrival[: h + 1] <= h)
        if seen.size:
            nearest[h] = int(seen[-1])
    return ArrivalSchedule(delays=delays, inter_arrivals=gaps, nearest_visible=nearest)


def sample_schedule(
    model: DelayModel, trajectory: Sequence[Tuple[int, int]], rng: np.random.Generator
) -> ArrivalSchedule:
    """Draw the inter-arrival of every step of a fixed (state, action) trajectory."""
    if len(trajectory) != model.horizon:
        raise ModelError(
            f"trajectory length {len(trajectory)} differs from horizon {model.horizon}"
        )
    gaps = [draw_inter_arrival(model, h, s, a, rng) for h, (s, a) in enumerate(trajectory)]
    return schedule_from_inter_arrivals(model.initial_delay, gaps)


def sample_mask(model: MissingModel, rng: np.random.Generator) -> np.ndarray:
    """
    Which observations survive the channel in one episode.

    The first observation is always delivered; a ``False`` entry is reported to
    the agent as a missing observation.
    """
    mask = rng.random(model.horizon) < model.rates
    mask[0] = True
    return mask


def describe(model: DelayModel | MissingModel) -> str:
    if isinstance(model, MissingModel):
        return f"missing(floor={model.floor:.3g})"
    mean_gap = model.mean_inter_arrival(0, 0, 0)
    summary = f"{model.kind}(initial_delay={model.initial_delay}, mean_gap={mean_gap:.3g})"
    logger.debug(f"Delay model summary: {summary}")
    return summary
