"""Instance Agent - Step 1: build the MDP and its observation model."""
from models.channels import DelayModel
from models.errors import ImpairedRLError
from models.state import ExperimentState
from services.channels import describe, validate_delay_model
from services.instances import resolve_experiment
from services.mdp_core import validate
from utils.logger import logger


async def instance_agent(state: ExperimentState) -> ExperimentState:
    """
    Instance Agent - Resolve the configured instance and impairment.

    INPUT: state with config
    OUTPUT: state with mdp and impairment populated
    """
    logger.info("Starting instance agent")
    config = state["config"]

    try:
        mdp, impairment = resolve_experiment(config)
        validate(mdp)
        if isinstance(impairment, DelayModel):
            validate_delay_model(impairment, mdp.horizon, mdp.num_states, mdp.num_actions)
    except ImpairedRLError as e:
        logger.error(f"Instance agent failed: {e}", exc_info=True)
        state["errors"].append(str(e))
        state["exit_code"] = e.exit_code
        state["status"] = "failed"
        return state

    state["mdp"] = mdp
    state["impairment"] = impairment
    state["status"] = "instance_ready"
    logger.info(
        f"Completed instance agent: {mdp.name} (S={mdp.num_states}, A={mdp.num_actions}, "
        f"H={mdp.horizon}), {describe(impairment)}"
    )
    return state
