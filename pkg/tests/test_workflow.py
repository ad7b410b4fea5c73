"""Integration tests for the experiment workflow."""
import json

import pytest

from models.experiment import ExperimentConfig
from workflows.experiment_workflow import create_experiment_workflow, run_experiment


def _config(out_dir, **fields) -> ExperimentConfig:
    data = {
        "instance": {
            "builtin": "random",
            "num_states": 2,
            "num_actions": 2,
            "horizon": 3,
            "seed": 4,
        },
        "impairment": {"type": "geometric", "p": 0.5},
        "algorithm": "alg1",
        "episodes": 12,
        "seed": 9,
        "output_dir": str(out_dir),
    }
    data.update(fields)
    return ExperimentConfig.from_dict(data)


def test_workflow_compiles():
    assert create_experiment_workflow() is not None


@pytest.mark.asyncio
async def test_oracle_only_dichotomy_run(tmp_path):
    """Test the oracle-only path on the dichotomy instance."""
    config = _config(
        tmp_path,
        instance={"builtin": "dichotomy", "d": 1, "horizon": 3},
        impairment=None,
        algorithm="oracle-only",
    )
    result = await run_experiment(config)

    assert result["status"] == "complete"
    summary = result["summaries"][0]
    assert summary["final_regret"] is None
    assert summary["gap"]["gap_d"] == pytest.approx(0.0, abs=1e-9)
    assert summary["gap"]["gap_d_plus_1"] == pytest.approx(0.5, abs=1e-9)
    written = json.loads(open(result["output_files"][0], encoding="utf-8").read())
    assert written["config_hash"] == result["config_hash"]


@pytest.mark.asyncio
@pytest.mark.parametrize(
    "algorithm, impairment",
    [
        ("alg1", {"type": "geometric", "p": 0.5}),
        ("alg2", {"type": "missing", "lambda": 0.8}),
        ("alg3", {"type": "missing", "lambda": [1.0, 0.9, 0.8]}),
    ],
)
async def test_learner_runs_write_traces(tmp_path, algorithm, impairment):
    """Test a full learner run for every algorithm."""
    result = await run_experiment(_config(tmp_path, algorithm=algorithm, impairment=impairment))

    assert result["status"] == "complete"
    csv_path = next(p for p in result["output_files"] if p.endswith(".csv"))
    lines = open(csv_path, encoding="utf-8").read().splitlines()
    assert len(lines) == 13
    assert lines[0].startswith("episode,regret_increment,cumulative_regret")
    assert result["summaries"][0]["seed"] == 9


@pytest.mark.asyncio
async def test_same_config_same_bytes(tmp_path):
    """Test that identical configs produce byte-identical traces and summaries."""
    first = await run_experiment(_config(tmp_path / "a"))
    second = await run_experiment(_config(tmp_path / "b"))

    assert first["config_hash"] == second["config_hash"]
    for left, right in zip(sorted(first["output_files"]), sorted(second["output_files"])):
        with open(left, "rb") as f, open(right, "rb") as g:
            assert f.read() == g.read()


@pytest.mark.asyncio
async def test_failed_instance_ends_the_run(tmp_path):
    """Test that a failed instance step skips learning and reporting."""
    config = _config(tmp_path, instance={"path": str(tmp_path / "missing.json")})
    result = await run_experiment(config)

    assert result["status"] == "failed"
    assert result["exit_code"] == 1
    assert result["traces"] == []
    assert result["output_files"] == []
