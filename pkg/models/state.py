"""State definitions for the LangGraph experiment workflow."""
from typing import Any, Dict, List, Optional, TypedDict

from models.channels import DelayModel, MissingModel
from models.experiment import ExperimentConfig
from models.learner import RegretTrace
from models.mdp import TabularMdp


class ExperimentState(TypedDict):
    """State object passed between agents in the workflow."""

    config: ExperimentConfig
    config_hash: str

    # Instance agent output
    mdp: Optional[TabularMdp]
    impairment: Optional[DelayModel | MissingModel]

    # Oracle agent output (oracle-only runs)
    gap: Optional[Dict[str, Any]]

    # Learner agent output, one trace per replication
    traces: List[RegretTrace]

    # Report agent output
    summaries: List[Dict[str, Any]]
    output_files: List[str]

    # "initial", "instance_ready", "oracle_complete", "learning_complete", "complete", "failed"
    status: str
    errors: List[str]
    exit_code: int


def initial_state(config: ExperimentConfig, config_hash: str) -> ExperimentState:
    return ExperimentState(
        config=config,
        config_hash=config_hash,
        mdp=None,
        impairment=None,
        gap=None,
        traces=[],
        summaries=[],
        output_files=[],
        status="initial",
        errors=[],
        exit_code=0,
    )
