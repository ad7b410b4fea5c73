"""Unit tests for the workflow agents."""
import pytest

from agents.instance_agent import instance_agent
from agents.learner_agent import learner_agent
from agents.oracle_agent import oracle_agent
from agents.report_agent import report_agent
from models.experiment import ExperimentConfig
from models.state import ExperimentState, initial_state


def _state(tmp_path, **fields) -> ExperimentState:
    data = {
        "instance": {"builtin": "random", "num_states": 2, "num_actions": 2, "horizon": 3},
        "impairment": {"type": "geometric", "p": 0.5},
        "episodes": 8,
        "output_dir": str(tmp_path),
    }
    data.update(fields)
    return initial_state(ExperimentConfig.from_dict(data), "deadbeef")


@pytest.mark.asyncio
async def test_instance_agent(tmp_path):
    """Test that the instance agent resolves the MDP and delay model."""
    result = await instance_agent(_state(tmp_path))

    assert result["status"] == "instance_ready"
    assert result["mdp"] is not None
    assert result["mdp"].horizon == 3
    assert result["impairment"] is not None


@pytest.mark.asyncio
async def test_instance_agent_missing_file(tmp_path):
    """Test that an unreadable instance file fails with a config error."""
    state = _state(tmp_path, instance={"path": str(tmp_path / "nope.json")})
    result = await instance_agent(state)

    assert result["status"] == "failed"
    assert result["exit_code"] == 1
    assert "nope.json" in result["errors"][0]


@pytest.mark.asyncio
async def test_oracle_agent_on_dichotomy_instance(tmp_path):
    """Test the oracle report under delays d and d+1."""
    state = _state(
        tmp_path,
        instance={"builtin": "dichotomy", "d": 2, "horizon": 4},
        impairment=None,
        algorithm="oracle-only",
    )
    result = await oracle_agent(await instance_agent(state))

    assert result["status"] == "oracle_complete"
    assert result["gap"]["gap_d"] == pytest.approx(0.0, abs=1e-9)
    assert result["gap"]["gap_d_plus_1"] == pytest.approx(0.5, abs=1e-9)
    assert result["gap"]["bound"] >= result["gap"]["exact_gap"] - 1e-9


@pytest.mark.asyncio
async def test_learner_agent_replications(tmp_path):
    """Test that replications run one seed each and carry the config hash."""
    state = await instance_agent(_state(tmp_path, replications=3, seed=5))
    result = await learner_agent(state)

    assert result["status"] == "learning_complete"
    assert [t.seed for t in result["traces"]] == [5, 6, 7]
    assert all(t.config_hash == "deadbeef" for t in result["traces"])
    assert all(len(t.records) == 8 for t in result["traces"])


@pytest.mark.asyncio
async def test_learner_agent_cap_exceeded(tmp_path):
    """Test that an augmented state cap overflow fails with exit code 2."""
    state = await instance_agent(_state(tmp_path, aug_state_cap=1))
    result = await learner_agent(state)

    assert result["status"] == "failed"
    assert result["exit_code"] == 2


@pytest.mark.asyncio
async def test_report_agent_writes_files(tmp_path):
    """Test trace, summary and aggregate files for a replicated run."""
    state = await learner_agent(await instance_agent(_state(tmp_path, replications=2)))
    result = await report_agent(state)

    assert result["status"] == "complete"
    names = sorted(p.rsplit("/", 1)[-1] for p in result["output_files"])
    stem = f"alg1_{state['mdp'].name}"
    assert names == sorted(
        [
            f"{stem}_0.csv",
            f"{stem}_0.json",
            f"{stem}_1.csv",
            f"{stem}_1.json",
            f"{stem}_0_aggregate.csv",
        ]
    )
    assert [s["seed"] for s in result["summaries"]] == [0, 1]
