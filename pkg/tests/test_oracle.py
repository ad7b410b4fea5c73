"""Tests for the exact comparators and the gap bound."""
import numpy as np
import pytest

from models.errors import InconsistentAugStateError, InstanceTooLargeError
from models.mdp import TabularMdp
from services.aug import (
    build_delayed_aug,
    build_delayed_aug_past,
    build_missing_aug,
    evaluate_aug,
    optimal_aug,
)
from services.channels import constant_delay, geometric_delay, missing_model
from services.environment import play_episode_delayed, play_episode_missing
from services.instances import (
    make_dichotomy_instance,
    random_executable_policy,
    random_geometric_delay,
    random_instance,
)
from services.mdp_core import value_iteration
from utils.rng import RngStreams
from services.oracle import (
    brute_force_optimal_executable,
    convexity_loss,
    dichotomy_gaps,
    dichotomy_table,
    gap_bound,
    latent_value,
    markov_visitation,
    visitation,
)


@pytest.mark.parametrize("d", [1, 2])
def test_dichotomy_gaps(d: int):
    row = dichotomy_gaps(d, d + 2)
    assert row["gap_d"] == pytest.approx(0.0, abs=1e-9)
    assert row["gap_d_plus_1"] == pytest.approx(0.5, abs=1e-9)
    assert row["v_nodelay"] == pytest.approx(1.0, abs=1e-9)
    assert row["v_delay_d_plus_1"] == pytest.approx(0.5, abs=1e-9)
    assert row["H"] == d + 2


def test_dichotomy_table_rows():
    rows = dichotomy_table((1, 2))
    assert [r["d"] for r in rows] == [1, 2]
    assert [r["H"] for r in rows] == [3, 4]


def test_visitation_layers_are_distributions(small_mdp: TabularMdp, geometric_half):
    aug = build_delayed_aug(small_mdp, geometric_half)
    pol = random_executable_policy(aug, np.random.default_rng(3))
    rho = visitation(aug, pol)
    for h in range(aug.horizon):
        assert rho.layer_mass(h) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("variant", ["expected", "past", "missing"])
def test_occupancy_weighted_rewards_equal_the_policy_value(small_mdp: TabularMdp, variant: str):
    if variant == "missing":
        aug = build_missing_aug(small_mdp, missing_model(0.6, 3))
    else:
        build = build_delayed_aug if variant == "expected" else build_delayed_aug_past
        aug = build(small_mdp, geometric_delay(0.4, 3, 2, 2))
    pol = random_executable_policy(aug, np.random.default_rng(12))
    rho = visitation(aug, pol)
    total = 0.0
    for h, layer in enumerate(aug.layers):
        for i, tau in enumerate(layer.states):
            total += rho.rho[h].get(tau, 0.0) * float(pol.distribution(h, tau) @ layer.rewards[i])
    assert total == pytest.approx(evaluate_aug(aug, pol).value, abs=1e-12)


@pytest.mark.parametrize("channel", ["delayed", "missing"])
def test_evaluate_aug_agrees_with_played_episodes(small_mdp: TabularMdp, channel: str):
    if channel == "delayed":
        model = geometric_delay(0.4, 3, 2, 2)
        aug = build_delayed_aug(small_mdp, model)
        play = play_episode_delayed
    else:
        model = missing_model(0.6, 3)
        aug = build_missing_aug(small_mdp, model)
        play = play_episode_missing
    pol = random_executable_policy(aug, np.random.default_rng(31))
    streams = RngStreams.from_seed(31)
    runs = 10_000
    returns = np.array([play(small_mdp, model, pol, streams).rewards.sum() for _ in range(runs)])
    exact = evaluate_aug(aug, pol).value
    assert abs(returns.mean() - exact) <= 4.0 * returns.std() / np.sqrt(runs)


def test_markov_visitation_layers_are_distributions(small_mdp: TabularMdp, geometric_half):
    pol, _ = value_iteration(small_mdp)
    rho = markov_visitation(small_mdp, geometric_half, pol)
    for h in range(small_mdp.horizon):
        assert rho.layer_mass(h) == pytest.approx(1.0, abs=1e-12)


def test_latent_value_of_augmented_optimum(small_mdp: TabularMdp, geometric_half):
    aug = build_delayed_aug(small_mdp, geometric_half)
    pol, values = optimal_aug(aug)
    assert latent_value(small_mdp, geometric_half, pol.act) == pytest.approx(
        values.value, abs=1e-10
    )


@pytest.mark.parametrize("seed", range(10))
def test_brute_force_matches_augmented_optimum_under_delay(seed: int):
    rng = np.random.default_rng(seed)
    mdp = random_instance(2, 2, 3, seed=seed)
    model = random_geometric_delay(rng, mdp.horizon, mdp.num_states, mdp.num_actions)
    expected = optimal_aug(build_delayed_aug(mdp, model))[1].value
    assert brute_force_optimal_executable(mdp, model) == pytest.approx(expected, abs=1e-10)


def test_brute_force_matches_augmented_optimum_under_initial_delay():
    mdp = random_instance(2, 2, 3, seed=5)
    model = constant_delay(1, mdp.horizon, mdp.num_states, mdp.num_actions)
    expected = optimal_aug(build_delayed_aug(mdp, model))[1].value
    assert brute_force_optimal_executable(mdp, model) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_brute_force_matches_augmented_optimum_when_missing(seed: int):
    mdp = random_instance(2, 2, 3, seed=100 + seed)
    model = missing_model(0.3 + 0.06 * seed, mdp.horizon)
    expected = optimal_aug(build_missing_aug(mdp, model))[1].value
    assert brute_force_optimal_executable(mdp, model) == pytest.approx(expected, abs=1e-10)


def test_brute_force_cap(small_mdp: TabularMdp, geometric_half):
    with pytest.raises(InstanceTooLargeError):
        brute_force_optimal_executable(small_mdp, geometric_half, policy_cap=1)


def test_gap_bound_dominates_gap_on_random_instances():
    rng = np.random.default_rng(7)
    for i in range(100):
        S, A, H = int(rng.integers(1, 4)), int(rng.integers(1, 3)), int(rng.integers(2, 5))
        mdp = random_instance(S, A, H, seed=1000 + i)
        model = random_geometric_delay(rng, H, S, A)
        report = gap_bound(mdp, model)
        assert report.exact_gap >= -1e-9
        assert report.bound >= report.exact_gap - 1e-9
        assert len(report.e1) == H and len(report.e2) == H


def test_belief_convexity_loss_is_nonnegative_on_random_instances():
    rng = np.random.default_rng(19)
    for i in range(50):
        S, A, H = int(rng.integers(1, 4)), int(rng.integers(1, 3)), int(rng.integers(2, 5))
        mdp = random_instance(S, A, H, seed=3000 + i)
        aug = build_delayed_aug(mdp, random_geometric_delay(rng, H, S, A))
        for h, layer in enumerate(aug.layers):
            b, r = layer.beliefs, mdp.reward[h]
            raw = b @ r.max(axis=1) - (b @ r).max(axis=1)
            assert np.all(raw >= -1e-12)
            np.testing.assert_allclose(convexity_loss(b, r), np.maximum(raw, 0.0))


def test_convexity_loss_rejects_non_distribution_beliefs():
    reward = np.array([[1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(convexity_loss(np.array([[0.5, 0.5]]), reward), [0.5])
    with pytest.raises(InconsistentAugStateError, match="convexity loss"):
        convexity_loss(np.array([[1.5, -0.5]]), reward)


def test_deterministic_instances_have_no_gap():
    rng = np.random.default_rng(8)
    for i in range(20):
        mdp = random_instance(3, 2, 4, seed=2000 + i, deterministic=True)
        model = random_geometric_delay(rng, mdp.horizon, mdp.num_states, mdp.num_actions)
        assert gap_bound(mdp, model).exact_gap == pytest.approx(0.0, abs=1e-9)


def test_gap_report_on_dichotomy_instance():
    mdp, at_d, _ = make_dichotomy_instance(2, 4)
    report = gap_bound(mdp, at_d)
    assert report.v_nodelay == pytest.approx(1.0)
    assert report.exact_gap == pytest.approx(0.0, abs=1e-9)
