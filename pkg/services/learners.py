"""
Online learners for impaired observations.

Every run plans, records the exact regret of the planned policy against the
best executable policy, plays one episode and folds the returned data into
its counters.
"""
import time
from typing import Callable, Optional, Tuple

import numpy as np

from models.aug import AugMdp, AugValues, ExecutablePolicy
from models.channels import DelayModel, MissingModel
from models.episode import EpisodeRecord
from models.learner import BonusConfig, Counts, RegretTrace
from models.mdp import TabularMdp
from services.aug import (
    build_delayed_aug,
    build_missing_aug,
    delayed_skeleton,
    evaluate_aug,
    missing_skeleton,
    optimal_aug,
    reward_to_go_caps,
    reweight_delayed,
    reweight_missing,
    step_reward_bounds,
)
from services.environment import play_episode_delayed, play_episode_missing
from services.estimators import (
    aug_beliefs,
    belief_rewards,
    delayed_bonus_layers,
    estimate_aug_kernel,
    estimate_delayed,
    estimate_kernel,
    estimate_rates,
    missing_bonus_layers,
    radius_table,
    update_delayed,
    update_missing,
)
from services.planning import extended_vi_missing, optimistic_vi
from utils.logger import logger
from utils.rng import RngStreams

OPTIMISM_TOL = 1e-9

Planner = Callable[[Counts], Tuple[ExecutablePolicy, AugValues]]
Player = Callable[[ExecutablePolicy, RngStreams], EpisodeRecord]
Updater = Callable[[Counts, EpisodeRecord], None]


def _run(
    name: str,
    mdp: TabularMdp,
    truth: AugMdp,
    counts: Counts,
    episodes: int,
    seed: int,
    plan: Planner,
    play: Player,
    update: Updater,
    on_episode: Optional[Callable[[Counts], None]] = None,
) -> RegretTrace:
    started = time.perf_counter()
    _, oracle = optimal_aug(truth)
    comparator = oracle.value
    streams = RngStreams.from_seed(seed)
    trace = RegretTrace(algorithm=name, instance=mdp.name, seed=seed)
    report_every = max(1, episodes // 10)
    logger.info(f"Starting {name} on {mdp.name}: {episodes} episodes, seed {seed}")

    for k in range(1, episodes + 1):
        policy, optimistic = plan(counts)
        played = evaluate_aug(truth, policy)
        optimistic_ok = bool(
            np.all(optimistic.root_values >= oracle.root_values - OPTIMISM_TOL)
        )
        trace.append(comparator - played.value, optimistic.value, comparator, optimistic_ok)
        record = play(policy, streams)
        update(counts, record)
        if on_episode is not None:
            on_episode(counts)
        if k % report_every == 0:
            logger.info(
                f"{name}: episode {k}/{episodes}, cumulative regret {trace.final_regret:.4f}"
            )

    trace.wall_time = time.perf_counter() - started
    logger.info(
        f"Completed {name}: final regret {trace.final_regret:.4f}, "
        f"optimism rate {trace.optimism_rate:.3f}"
    )
    return trace


def run_alg1(
    mdp: TabularMdp,
    model: DelayModel,
    cfg: BonusConfig,
    episodes: int,
    seed: int,
    cap: Optional[int] = None,
) -> RegretTrace:
    """
    Bonus-driven optimistic value iteration on the past-reward augmented MDP.

    The reward table, the initial distribution and the first delay are known;
    kernels and arrival hazards are estimated from the data returned at the
    end of every episode.

    Args:
        mdp: Ground-truth MDP
        model: Delay model
        cfg: Bonus configuration
        episodes: Number of episodes K
        seed: Seed of the run's generator streams
        cap: Augmented state-action cap, defaults to ``AUG_STATE_CAP``

    Returns:
        RegretTrace with one record per episode
    """
    H, S, A = mdp.horizon, mdp.num_states, mdp.num_actions
    truth = build_delayed_aug(mdp, model, cap)
    skeleton = delayed_skeleton(mdp.reward, mdp.initial_dist, model.initial_delay, cap)
    caps = reward_to_go_caps(skeleton)

    def plan(counts: Counts) -> Tuple[ExecutablePolicy, AugValues]:
        kernel, hazard = estimate_delayed(counts)
        planned = reweight_delayed(skeleton, kernel, hazard, mdp.initial_dist)
        return optimistic_vi(planned, delayed_bonus_layers(skeleton, counts, cfg), caps)

    return _run(
        "alg1",
        mdp,
        truth,
        Counts.empty(S, A, H),
        episodes,
        seed,
        plan,
        lambda pol, streams: play_episode_delayed(mdp, model, pol, streams),
        update_delayed,
    )


def run_alg2(
    mdp: TabularMdp,
    model: MissingModel,
    cfg: BonusConfig,
    episodes: int,
    seed: int,
    cap: Optional[int] = None,
) -> RegretTrace:
    """Extended value iteration over L1 kernel confidence sets, observation rates known."""
    H, S, A = mdp.horizon, mdp.num_states, mdp.num_actions
    truth = build_missing_aug(mdp, model, cap)
    skeleton = missing_skeleton(S, A, H, mdp.initial_dist, cap)
    caps = reward_to_go_caps(skeleton, step_reward_bounds(mdp.reward, skeleton))

    def plan(counts: Counts) -> Tuple[ExecutablePolicy, AugValues]:
        return extended_vi_missing(
            skeleton,
            mdp.reward,
            estimate_kernel(counts),
            radius_table(counts, cfg),
            model.rates,
            caps,
        )

    return _run(
        "alg2",
        mdp,
        truth,
        Counts.empty(S, A, H, skeleton.layer_sizes()),
        episodes,
        seed,
        plan,
        lambda pol, streams: play_episode_missing(mdp, model, pol, streams),
        lambda counts, record: update_missing(counts, record, skeleton),
    )


def run_alg3(
    mdp: TabularMdp,
    model: MissingModel,
    cfg: BonusConfig,
    episodes: int,
    seed: int,
    cap: Optional[int] = None,
) -> RegretTrace:
    """
    Bonus-driven optimistic value iteration on the missing-observation augmented MDP.

    Next-state distributions are estimated per augmented state and action,
    observation rates from the observed fraction. The per-episode rate
    estimates are kept in ``trace.extra["rate_estimates"]``.
    """
    H, S, A = mdp.horizon, mdp.num_states, mdp.num_actions
    truth = build_missing_aug(mdp, model, cap)
    skeleton = missing_skeleton(S, A, H, mdp.initial_dist, cap)
    caps = reward_to_go_caps(skeleton, step_reward_bounds(mdp.reward, skeleton))
    rate_history: list[list[float]] = []

    def plan(counts: Counts) -> Tuple[ExecutablePolicy, AugValues]:
        aug_kernel = estimate_aug_kernel(counts)
        rewards = belief_rewards(mdp.reward, aug_beliefs(skeleton, aug_kernel))
        planned = reweight_missing(skeleton, aug_kernel, estimate_rates(counts), rewards)
        bonus = missing_bonus_layers(skeleton, counts, cfg, counts.episodes)
        return optimistic_vi(planned, bonus, caps)

    trace = _run(
        "alg3",
        mdp,
        truth,
        Counts.empty(S, A, H, skeleton.layer_sizes()),
        episodes,
        seed,
        plan,
        lambda pol, streams: play_episode_missing(mdp, model, pol, streams),
        lambda counts, record: update_missing(counts, record, skeleton),
        on_episode=lambda counts: rate_history.append(estimate_rates(counts).tolist()),
    )
    trace.extra["rate_estimates"] = rate_history
    return trace
