"""Learner Agent: run the configured learner once per replication."""
import asyncio
from typing import Callable, Dict, List

from models.errors import ImpairedRLError
from models.learner import BonusConfig, RegretTrace
from models.state import ExperimentState
from services.learners import run_alg1, run_alg2, run_alg3
from utils.logger import logger

LEARNERS: Dict[str, Callable[..., RegretTrace]] = {
    "alg1": run_alg1,
    "alg2": run_alg2,
    "alg3": run_alg3,
}


async def learner_agent(state: ExperimentState) -> ExperimentState:
    """
    Learner Agent - Run seeds ``seed .. seed + replications - 1``.

    Replications are independent and run concurrently in worker threads.

    INPUT: state with config, mdp and impairment
    OUTPUT: state with traces populated, ordered by seed
    """
    logger.info("Starting learner agent")
    config = state["config"]
    mdp, model = state["mdp"], state["impairment"]
    assert mdp is not None and model is not None

    run = LEARNERS[config.algorithm]
    bonus = BonusConfig(
        c=config.c,
        gamma=config.gamma,
        num_states=mdp.num_states,
        num_actions=mdp.num_actions,
        episodes=config.episodes,
        horizon=mdp.horizon,
    )
    seeds = [config.seed + i for i in range(config.replications)]
    if len(seeds) > 1:
        logger.info(f"Fanning out {len(seeds)} replications of {config.algorithm}")

    try:
        traces: List[RegretTrace] = list(
            await asyncio.gather(
                *(
                    asyncio.to_thread(
                        run, mdp, model, bonus, config.episodes, seed, config.aug_state_cap
                    )
                    for seed in seeds
                )
            )
        )
    except ImpairedRLError as e:
        logger.error(f"Learner agent failed: {e}", exc_info=True)
        state["errors"].append(str(e))
        state["exit_code"] = e.exit_code
        state["status"] = "failed"
        return state

    for trace in traces:
        trace.config_hash = state["config_hash"]
    state["traces"] = traces
    state["status"] = "learning_complete"
    logger.info(f"Completed learner agent: {len(traces)} run(s)")
    return state
