"""Unit tests for delay and missing-observation channels."""
import numpy as np
import pytest

from models.channels import NOTHING_VISIBLE
from models.errors import ModelError
from services.channels import (
    constant_delay,
    geometric_delay,
    missing_model,
    sample_mask,
    sample_schedule,
    schedule_from_inter_arrivals,
    table_delay,
    truncate_pmf,
    validate_delay_model,
)
from utils.rng import make_generator


def test_geometric_folds_tail():
    model = geometric_delay(0.5, horizon=3, num_states=2, num_actions=2)
    assert model.pmf.shape == (3, 2, 2, 4)
    np.testing.assert_allclose(model.pmf[1, 1, 0], [0.5, 0.25, 0.125, 0.125])
    assert model.initial_delay == 0
    validate_delay_model(model, 3, 2, 2)


def test_geometric_p_one_is_immediate():
    model = geometric_delay(1.0, horizon=4)
    np.testing.assert_allclose(model.pmf[0, 0, 0], [1.0, 0.0, 0.0, 0.0, 0.0])


@pytest.mark.parametrize("p", [0.0, -0.1, 1.5])
def test_geometric_rejects_bad_p(p: float):
    with pytest.raises(ModelError):
        geometric_delay(p, horizon=3)


def test_constant_delay():
    model = constant_delay(2, horizon=4)
    assert model.initial_delay == 2
    assert model.pmf[0, 0, 0, 0] == 1.0
    with pytest.raises(ModelError):
        constant_delay(4, horizon=4)


def test_truncate_pmf():
    np.testing.assert_allclose(truncate_pmf([0.2, 0.3, 0.5], horizon=1), [0.2, 0.8])
    np.testing.assert_allclose(truncate_pmf([1.0], horizon=2), [1.0, 0.0, 0.0])
    with pytest.raises(ModelError, match="sums to"):
        truncate_pmf([0.2, 0.2], horizon=2)


def test_table_delay_vector_and_full():
    shared = table_delay([0.5, 0.5], horizon=2, num_states=1, num_actions=2, initial_delay=1)
    np.testing.assert_allclose(shared.pmf[1, 0, 1], [0.5, 0.5, 0.0])
    assert shared.initial_delay == 1
    full = np.zeros((2, 1, 2, 3))
    full[..., 0] = 1.0
    assert table_delay(full, horizon=2, num_states=1, num_actions=2).pmf[0, 0, 0, 0] == 1.0
    with pytest.raises(ModelError, match="neither a vector"):
        table_delay(np.ones((2, 2)), horizon=2)


def test_missing_model_validation():
    np.testing.assert_allclose(missing_model(0.8, 3).rates, [0.8, 0.8, 0.8])
    assert missing_model([1.0, 0.5], 2).floor == 0.5
    with pytest.raises(ModelError):
        missing_model(0.0, 3)
    with pytest.raises(ModelError, match="expected 3"):
        missing_model([0.5, 0.5], 3)


def test_schedule_from_inter_arrivals():
    schedule = schedule_from_inter_arrivals(0, [1, 0, 2])
    np.testing.assert_array_equal(schedule.delays, [0, 1, 1])
    np.testing.assert_array_equal(schedule.nearest_visible, [0, 0, 1])
    assert schedule.arrivals_at(2) == [1]


def test_schedule_with_initial_delay():
    schedule = schedule_from_inter_arrivals(2, [0, 0, 0, 0])
    np.testing.assert_array_equal(schedule.delays, [2, 2, 2, 2])
    assert list(schedule.nearest_visible) == [NOTHING_VISIBLE, NOTHING_VISIBLE, 0, 1]
    assert schedule.arrival_time(3) == 5


def test_sample_mask_observed_fraction():
    model = missing_model(0.5, 3)
    rng = make_generator(3, "masks")
    masks = np.array([sample_mask(model, rng) for _ in range(10_000)])
    assert masks[:, 0].all()
    for h in (1, 2):
        assert masks[:, h].mean() == pytest.approx(0.5, abs=0.02)


def test_sample_mask_always_observed_at_rate_one():
    model = missing_model(1.0, 4)
    rng = make_generator(0, "masks")
    assert all(sample_mask(model, rng).all() for _ in range(100))


def _trajectory(horizon: int):
    return [(h % 2, (h + 1) % 2) for h in range(horizon)]


def test_sample_schedule_point_mass_at_zero_sees_every_step():
    model = geometric_delay(1.0, horizon=5, num_states=2, num_actions=2)
    schedule = sample_schedule(model, _trajectory(5), make_generator(0, "delays"))
    np.testing.assert_array_equal(schedule.delays, np.zeros(5))
    np.testing.assert_array_equal(schedule.nearest_visible, np.arange(5))


def test_sample_schedule_is_reproducible():
    model = geometric_delay(0.4, horizon=6, num_states=2, num_actions=2)
    first = sample_schedule(model, _trajectory(6), make_generator(9, "delays"))
    second = sample_schedule(model, _trajectory(6), make_generator(9, "delays"))
    np.testing.assert_array_equal(first.inter_arrivals, second.inter_arrivals)
    np.testing.assert_array_equal(first.delays, second.delays)
    np.testing.assert_array_equal(first.nearest_visible, second.nearest_visible)


def test_sample_schedule_rejects_wrong_trajectory_length():
    model = geometric_delay(0.5, horizon=3, num_states=2, num_actions=2)
    with pytest.raises(ModelError, match="trajectory length"):
        sample_schedule(model, _trajectory(2), make_generator(0, "delays"))


def test_sample_schedule_mean_inter_arrival():
    horizon, draws = 4, 20_000
    model = geometric_delay(0.5, horizon=horizon, num_states=2, num_actions=2)
    rng = make_generator(5, "delays")
    gaps = np.array(
        [sample_schedule(model, _trajectory(horizon), rng).inter_arrivals for _ in range(draws)]
    )
    deltas = np.arange(horizon + 1)
    pmf = model.pmf[0, 0, 0]
    mean = float(pmf @ deltas)
    std = float(np.sqrt(pmf @ (deltas - mean) ** 2))
    for h in range(horizon):
        assert abs(gaps[:, h].mean() - mean) <= 3.0 * std / np.sqrt(draws)


def test_models_equal_below_horizon_give_equal_schedules():
    short = table_delay([0.5, 0.25, 0.125, 0.125], horizon=3, num_states=2, num_actions=2)
    long = table_delay([0.5, 0.25, 0.125, 0.0625, 0.0625], horizon=3, num_states=2, num_actions=2)
    np.testing.assert_array_equal(short.pmf, long.pmf)
    for seed in range(20):
        a = sample_schedule(short, _trajectory(3), make_generator(seed, "delays"))
        b = sample_schedule(long, _trajectory(3), make_generator(seed, "delays"))
        np.testing.assert_array_equal(a.delays, b.delays)
        np.testing.assert_array_equal(a.nearest_visible, b.nearest_visible)


@pytest.mark.parametrize("initial_delay", [0, 2])
def test_nearest_visible_advances_at_most_one_step(initial_delay: int):
    model = geometric_delay(0.3, horizon=6, num_states=2, num_actions=2)
    model = table_delay(model.pmf[0, 0, 0], 6, 2, 2, initial_delay=initial_delay)
    rng = make_generator(1, "delays")
    for _ in range(500):
        schedule = sample_schedule(model, _trajectory(6), rng)
        assert set(np.diff(schedule.nearest_visible).tolist()) <= {0, 1}
        assert np.all(schedule.nearest_visible <= np.arange(6))
        assert np.all(np.diff(schedule.delays) >= 0)
