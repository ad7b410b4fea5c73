"""Oracle Agent: exact executable-policy gap for oracle-only runs."""
from models.channels import DelayModel
from models.errors import ImpairedRLError
from models.state import ExperimentState
from services.oracle import dichotomy_gaps, gap_bound
from utils.logger import logger


async def oracle_agent(state: ExperimentState) -> ExperimentState:
    """
    Oracle Agent - Compute the gap report.

    On the dichotomy instance the report carries the gaps under delays d and
    d+1; otherwise it is the gap and bound of the configured delay model.

    INPUT: state with mdp and impairment
    OUTPUT: state with gap populated
    """
    logger.info("Starting oracle agent")
    config = state["config"]
    mdp, model = state["mdp"], state["impairment"]
    assert mdp is not None and isinstance(model, DelayModel)

    try:
        report = gap_bound(mdp, model, config.aug_state_cap).model_dump()
        if config.instance.builtin == "dichotomy":
            report.update(
                dichotomy_gaps(config.instance.d, config.instance.horizon, config.aug_state_cap)
            )
    except ImpairedRLError as e:
        logger.error(f"Oracle agent failed: {e}", exc_info=True)
        state["errors"].append(str(e))
        state["exit_code"] = e.exit_code
        state["status"] = "failed"
        return state

    state["gap"] = report
    state["status"] = "oracle_complete"
    logger.info(f"Completed oracle agent: exact gap {report['exact_gap']:.6f}")
    return state
