"""LangGraph workflow for one experiment run."""
from typing import Any

from langgraph.graph import END, StateGraph

from agents.instance_agent import instance_agent
from agents.learner_agent import learner_agent
from agents.oracle_agent import oracle_agent
from agents.report_agent import report_agent
from models.experiment import ExperimentConfig
from models.state import ExperimentState, initial_state
from utils.json_utils import config_hash
from utils.logger import logger


def _after_instance(state: ExperimentState) -> str:
    if state["status"] == "failed":
        return "end"
    return "oracle" if state["config"].algorithm == "oracle-only" else "learner"


def _unless_failed(state: ExperimentState) -> str:
    return "end" if state["status"] == "failed" else "report"


def create_experiment_workflow() -> Any:
    """
    Create and return the LangGraph workflow for an experiment.

    Workflow structure:
    1. instance_agent -> Build the MDP and its observation model
    2. oracle_agent (oracle-only) or learner_agent (alg1/alg2/alg3)
    3. report_agent -> Write trace CSVs, summary JSONs and the aggregate

    A failed step ends the run; its error stays in ``state["errors"]``.

    Returns:
        Compiled LangGraph workflow
    """
    logger.info("Creating experiment workflow")

    workflow = StateGraph(ExperimentState)

    workflow.add_node("instance", instance_agent)
    workflow.add_node("oracle", oracle_agent)
    workflow.add_node("learner", learner_agent)
    workflow.add_node("report", report_agent)

    workflow.set_entry_point("instance")
    workflow.add_conditional_edges(
        "instance", _after_instance, {"oracle": "oracle", "learner": "learner", "end": END}
    )
    workflow.add_conditional_edges("oracle", _unless_failed, {"report": "report", "end": END})
    workflow.add_conditional_edges("learner", _unless_failed, {"report": "report", "end": END})
    workflow.add_edge("report", END)

    app = workflow.compile()

    logger.info("Experiment workflow created successfully")
    return app


async def run_experiment(config: ExperimentConfig) -> ExperimentState:
    """Run the workflow for one config and return the final state."""
    workflow = create_experiment_workflow()
    state = initial_state(config, config_hash(config.hash_payload()))
    logger.info(f"Running experiment {state['config_hash']}: {config.algorithm}")
    return await workflow.ainvoke(state)
