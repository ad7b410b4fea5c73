"""Shared fixtures."""
import numpy as np
import pytest

from models.channels import DelayModel, MissingModel
from models.learner import BonusConfig
from models.mdp import TabularMdp
from services.channels import geometric_delay, missing_model
from services.instances import random_instance


@pytest.fixture
def tiny_mdp() -> TabularMdp:
    """Two steps, two states, two actions; optimal value 1.3 from a uniform start."""
    reward = np.array(
        [
            [[0.0, 0.5], [1.0, 0.0]],
            [[1.0, 0.0], [0.0, 0.2]],
        ]
    )
    kernel = np.array(
        [
            [
                [[1.0, 0.0], [0.0, 1.0]],
                [[0.5, 0.5], [0.0, 1.0]],
            ]
        ]
    )
    return TabularMdp(reward=reward, kernel=kernel, initial_dist=np.array([0.5, 0.5]), name="tiny")


@pytest.fixture
def small_mdp() -> TabularMdp:
    return random_instance(2, 2, 3, seed=11)


@pytest.fixture
def geometric_half(small_mdp: TabularMdp) -> DelayModel:
    return geometric_delay(0.5, small_mdp.horizon, small_mdp.num_states, small_mdp.num_actions)


@pytest.fixture
def lossy(small_mdp: TabularMdp) -> MissingModel:
    return missing_model(0.7, small_mdp.horizon)


@pytest.fixture
def bonus_cfg(small_mdp: TabularMdp) -> BonusConfig:
    return BonusConfig(
        c=1.0,
        gamma=0.1,
        num_states=small_mdp.num_states,
        num_actions=small_mdp.num_actions,
        episodes=100,
        horizon=small_mdp.horizon,
    )
