"""Tests for the online learners; long acceptance runs are marked slow."""
from typing import Callable, List

import numpy as np
import pytest

from models.learner import BonusConfig, RegretTrace
from models.mdp import TabularMdp
from services.channels import constant_delay, geometric_delay, missing_model
from services.instances import chain_instance, random_instance
from services.learners import run_alg1, run_alg2, run_alg3
from services.mdp_core import value_iteration


def _check_trace(trace: RegretTrace, episodes: int) -> None:
    assert len(trace.records) == episodes
    np.testing.assert_allclose(trace.cumulative, np.cumsum(trace.increments), atol=1e-9)
    assert np.all(trace.increments >= -1e-9)
    assert len({r.oracle_value for r in trace.records}) == 1
    assert [r.episode for r in trace.records] == list(range(1, episodes + 1))
    assert trace.optimism_flags[0]


def test_alg1_short_run(small_mdp: TabularMdp, geometric_half, bonus_cfg: BonusConfig):
    trace = run_alg1(small_mdp, geometric_half, bonus_cfg, episodes=25, seed=0)
    _check_trace(trace, 25)
    assert trace.algorithm == "alg1"
    assert trace.instance == small_mdp.name
    assert trace.wall_time > 0.0
    assert all(r.optimistic_value <= small_mdp.horizon + 1e-12 for r in trace.records)


def test_alg2_short_run(small_mdp: TabularMdp, lossy, bonus_cfg: BonusConfig):
    trace = run_alg2(small_mdp, lossy, bonus_cfg, episodes=20, seed=1)
    _check_trace(trace, 20)


def test_alg3_short_run(small_mdp: TabularMdp, lossy, bonus_cfg: BonusConfig):
    trace = run_alg3(small_mdp, lossy, bonus_cfg, episodes=20, seed=2)
    _check_trace(trace, 20)
    rates = trace.extra["rate_estimates"]
    assert len(rates) == 20
    assert all(len(r) == small_mdp.horizon and r[0] == 1.0 for r in rates)


@pytest.mark.parametrize(
    "run, model_factory",
    [
        (run_alg1, lambda: geometric_delay(0.5, 3, 2, 2)),
        (run_alg2, lambda: missing_model(0.7, 3)),
        (run_alg3, lambda: missing_model(0.7, 3)),
    ],
)
def test_same_seed_same_trace(small_mdp: TabularMdp, bonus_cfg: BonusConfig, run, model_factory):
    first = run(small_mdp, model_factory(), bonus_cfg, episodes=10, seed=42)
    second = run(small_mdp, model_factory(), bonus_cfg, episodes=10, seed=42)
    np.testing.assert_array_equal(first.increments, second.increments)
    assert [r.optimistic_value for r in first.records] == [
        r.optimistic_value for r in second.records
    ]


def test_zero_delay_comparator_is_the_mdp_optimum(small_mdp: TabularMdp, bonus_cfg: BonusConfig):
    trace = run_alg1(small_mdp, geometric_delay(1.0, 3, 2, 2), bonus_cfg, episodes=3, seed=0)
    v_star = value_iteration(small_mdp)[1].initial_value(small_mdp.initial_dist)
    assert trace.records[0].oracle_value == pytest.approx(v_star, abs=1e-10)


def test_full_observation_comparator_is_the_mdp_optimum(
    small_mdp: TabularMdp, bonus_cfg: BonusConfig
):
    trace = run_alg3(small_mdp, missing_model(1.0, 3), bonus_cfg, episodes=3, seed=0)
    v_star = value_iteration(small_mdp)[1].initial_value(small_mdp.initial_dist)
    assert trace.records[0].oracle_value == pytest.approx(v_star, abs=1e-10)
    assert all(r == [1.0, 1.0, 1.0] for r in trace.extra["rate_estimates"])


def test_alg1_deterministic_chain_with_constant_delay_stops_paying_regret():
    mdp = chain_instance(2, 2, 3)
    model = constant_delay(1, 3, 2, 2)
    # bonuses far below every action gap of the instance
    cfg = BonusConfig(c=1e-9, gamma=0.1, num_states=2, num_actions=2, episodes=60, horizon=3)
    trace = run_alg1(mdp, model, cfg, episodes=60, seed=0)
    _check_trace(trace, 60)
    assert np.all(trace.increments[-20:] <= 1e-9)


@pytest.mark.parametrize("run", [run_alg1, run_alg3])
def test_optimistic_values_stay_below_the_payable_reward(bonus_cfg: BonusConfig, run):
    mdp = chain_instance(2, 2, 3)
    model = constant_delay(1, 3, 2, 2) if run is run_alg1 else missing_model(0.7, 3)
    payable = mdp.reward.max(axis=(1, 2)).sum()
    trace = run(mdp, model, bonus_cfg, episodes=15, seed=3)
    assert all(r.optimistic_value <= payable + 1e-12 for r in trace.records)
    assert all(r.optimistic_value >= r.oracle_value - 1e-9 for r in trace.records)



def test_alg3_rate_estimates_concentrate(small_mdp: TabularMdp, bonus_cfg: BonusConfig):
    model = missing_model([1.0, 0.6, 0.8], 3)
    within = 0
    seeds = 20
    for seed in range(seeds):
        trace = run_alg3(small_mdp, model, bonus_cfg, episodes=60, seed=seed)
        estimates = np.array(trace.extra["rate_estimates"])
        k = np.arange(1, 61)[:, None]
        within += bool(np.all(np.abs(estimates - model.rates) <= 2.0 * np.sqrt(bonus_cfg.iota / k)))
    assert within >= 0.95 * seeds


def test_alg2_optimism_rate(small_mdp: TabularMdp, lossy, bonus_cfg: BonusConfig):
    for seed in range(5):
        trace = run_alg2(small_mdp, lossy, bonus_cfg, episodes=30, seed=seed)
        assert trace.optimism_rate >= 1.0 - bonus_cfg.gamma


def test_alg3_at_full_observation_follows_alg1_at_zero_delay(small_mdp: TabularMdp):
    H, S, A = small_mdp.horizon, small_mdp.num_states, small_mdp.num_actions
    cfg = BonusConfig(c=1e-9, gamma=0.1, num_states=S, num_actions=A, episodes=40, horizon=H)
    delayed = run_alg1(small_mdp, geometric_delay(1.0, H, S, A), cfg, episodes=40, seed=5)
    missing = run_alg3(small_mdp, missing_model(1.0, H), cfg, episodes=40, seed=5)
    np.testing.assert_allclose(missing.increments, delayed.increments, atol=1e-6)


# Acceptance runs


def _audit_instance() -> TabularMdp:
    return random_instance(2, 2, 3, seed=2024)


def _config(mdp: TabularMdp, episodes: int) -> BonusConfig:
    return BonusConfig(
        c=1.0,
        gamma=0.1,
        num_states=mdp.num_states,
        num_actions=mdp.num_actions,
        episodes=episodes,
        horizon=mdp.horizon,
    )


@pytest.mark.slow
@pytest.mark.parametrize("algorithm", ["alg1", "alg3"])
def test_optimism_audit(algorithm: str):
    mdp = _audit_instance()
    episodes = 500
    cfg = _config(mdp, episodes)
    held = 0
    for seed in range(200):
        if algorithm == "alg1":
            trace = run_alg1(mdp, geometric_delay(0.5, 3, 2, 2), cfg, episodes, seed)
        else:
            trace = run_alg3(mdp, missing_model(0.9, 3), cfg, episodes, seed)
        held += all(trace.optimism_flags)
    assert held >= 180


def _sublinear(run: Callable[[int], RegretTrace], seeds: int = 20) -> None:
    traces: List[RegretTrace] = [run(seed) for seed in range(seeds)]
    first = np.mean([t.decile_slopes()[0] for t in traces])
    last = np.mean([t.decile_slopes()[1] for t in traces])
    assert last <= 0.25 * first
    at_500 = np.mean([t.cumulative[499] for t in traces])
    at_2000 = np.mean([t.cumulative[1999] for t in traces])
    assert at_2000 <= 2.2 * at_500


@pytest.mark.slow
def test_alg1_regret_is_sublinear():
    mdp = random_instance(3, 2, 4, seed=0)
    model = geometric_delay(0.5, 4, 3, 2)
    cfg = _config(mdp, 2000)
    _sublinear(lambda seed: run_alg1(mdp, model, cfg, 2000, seed))


@pytest.mark.slow
def test_alg2_regret_is_sublinear():
    mdp = random_instance(3, 2, 4, seed=0)
    model = missing_model(0.8, 4)
    cfg = _config(mdp, 2000)
    _sublinear(lambda seed: run_alg2(mdp, model, cfg, 2000, seed))


@pytest.mark.slow
def test_alg3_regret_is_sublinear():
    mdp = random_instance(3, 2, 4, seed=0)
    model = missing_model(0.9, 4)
    cfg = _config(mdp, 2000)
    _sublinear(lambda seed: run_alg3(mdp, model, cfg, 2000, seed))
