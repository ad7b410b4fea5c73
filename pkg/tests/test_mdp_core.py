"""Unit tests for the ground-truth MDP core."""
import itertools

import numpy as np
import pytest

from models.errors import HorizonError, MdpValidationError
from models.mdp import MarkovPolicy, TabularMdp
from services.instances import random_instance
from services.mdp_core import (
    evaluate_markov,
    multi_step_kernel,
    state_occupancy,
    validate,
    value_iteration,
)


def test_validate_accepts_tiny(tiny_mdp: TabularMdp):
    validate(tiny_mdp)


def test_validate_rejects_bad_row_sum(tiny_mdp: TabularMdp):
    kernel = np.array(tiny_mdp.kernel)
    kernel[0, 1, 0] = [0.5, 0.4]
    mdp = TabularMdp(reward=tiny_mdp.reward, kernel=kernel, initial_dist=tiny_mdp.initial_dist)
    with pytest.raises(MdpValidationError, match="row sum"):
        validate(mdp)


def test_validate_rejects_reward_out_of_range(tiny_mdp: TabularMdp):
    reward = np.array(tiny_mdp.reward)
    reward[1, 0, 1] = 1.5
    mdp = TabularMdp(reward=reward, kernel=tiny_mdp.kernel, initial_dist=tiny_mdp.initial_dist)
    with pytest.raises(MdpValidationError, match="h=1, s=0, a=1"):
        validate(mdp)


def test_validate_rejects_kernel_shape(tiny_mdp: TabularMdp):
    mdp = TabularMdp(
        reward=tiny_mdp.reward,
        kernel=np.zeros((2, 2, 2, 2)),
        initial_dist=tiny_mdp.initial_dist,
    )
    with pytest.raises(MdpValidationError, match="kernel shape"):
        validate(mdp)


def test_value_iteration_tiny(tiny_mdp: TabularMdp):
    pol, values = value_iteration(tiny_mdp)
    np.testing.assert_allclose(values.v[1], [1.0, 0.2])
    np.testing.assert_allclose(values.v[0], [1.0, 1.6])
    assert values.initial_value(tiny_mdp.initial_dist) == pytest.approx(1.3)
    np.testing.assert_array_equal(pol.greedy_actions(), [[0, 0], [0, 1]])


def test_value_iteration_breaks_ties_low():
    mdp = TabularMdp(
        reward=np.full((2, 2, 3), 0.5),
        kernel=np.full((1, 2, 3, 2), 0.5),
        initial_dist=np.array([1.0, 0.0]),
    )
    pol, _ = value_iteration(mdp)
    assert np.all(pol.greedy_actions() == 0)


def test_evaluate_markov_uniform(tiny_mdp: TabularMdp):
    values = evaluate_markov(tiny_mdp, MarkovPolicy.uniform(2, 2, 2))
    np.testing.assert_allclose(values.v[1], [0.5, 0.1])
    np.testing.assert_allclose(values.v[0], [0.55, 0.7])


def test_evaluate_markov_matches_value_iteration(small_mdp: TabularMdp):
    pol, optimal = value_iteration(small_mdp)
    np.testing.assert_allclose(evaluate_markov(small_mdp, pol).v, optimal.v, atol=1e-12)


def test_evaluate_markov_rejects_wrong_shape(tiny_mdp: TabularMdp):
    with pytest.raises(MdpValidationError):
        evaluate_markov(tiny_mdp, MarkovPolicy.uniform(3, 2, 2))


def test_multi_step_kernel(tiny_mdp: TabularMdp):
    np.testing.assert_allclose(multi_step_kernel(tiny_mdp, 0, 1, [0]), [0.5, 0.5])
    np.testing.assert_allclose(multi_step_kernel(tiny_mdp, 1, 1, []), [0.0, 1.0])


def test_multi_step_kernel_past_horizon(tiny_mdp: TabularMdp):
    with pytest.raises(HorizonError):
        multi_step_kernel(tiny_mdp, 0, 0, [0, 0])


def test_state_occupancy(tiny_mdp: TabularMdp):
    pol, _ = value_iteration(tiny_mdp)
    occ = state_occupancy(tiny_mdp, pol)
    np.testing.assert_allclose(occ, [[0.5, 0.5], [0.75, 0.25]])


def test_value_iteration_dominates_random_markov_policies(small_mdp: TabularMdp):
    _, optimal = value_iteration(small_mdp)
    rng = np.random.default_rng(17)
    H, S, A = small_mdp.horizon, small_mdp.num_states, small_mdp.num_actions
    for _ in range(100):
        pol = MarkovPolicy(rng.dirichlet(np.ones(A), size=(H, S)))
        values = evaluate_markov(small_mdp, pol)
        assert np.all(values.v[:H] <= optimal.v[:H] + 1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_value_iteration_matches_deterministic_policy_enumeration(seed: int):
    mdp = random_instance(2, 2, 3, seed=seed)
    H, S, A = mdp.horizon, mdp.num_states, mdp.num_actions
    best = max(
        evaluate_markov(
            mdp, MarkovPolicy.deterministic(np.reshape(choice, (H, S)), A)
        ).initial_value(mdp.initial_dist)
        for choice in itertools.product(range(A), repeat=H * S)
    )
    v_star = value_iteration(mdp)[1].initial_value(mdp.initial_dist)
    assert v_star == pytest.approx(best, abs=1e-12)


def test_evaluate_markov_agrees_with_rollouts(small_mdp: TabularMdp):
    H, S, A = small_mdp.horizon, small_mdp.num_states, small_mdp.num_actions
    rng = np.random.default_rng(23)
    pol = MarkovPolicy(rng.dirichlet(np.ones(A), size=(H, S)))
    runs = 20_000
    returns = np.zeros(runs)
    for k in range(runs):
        s = rng.choice(S, p=small_mdp.initial_dist)
        for h in range(H):
            a = rng.choice(A, p=pol.action_dist[h, s])
            returns[k] += small_mdp.reward[h, s, a]
            if h < H - 1:
                s = rng.choice(S, p=small_mdp.kernel[h, s, a])
    exact = evaluate_markov(small_mdp, pol).initial_value(small_mdp.initial_dist)
    assert abs(returns.mean() - exact) <= 4.0 * returns.std() / np.sqrt(runs)
