"""Report Agent: write traces, summaries and the replication aggregate."""
from pathlib import Path

from models.state import ExperimentState
from services.trace_writer import (
    summarize,
    trace_filename,
    write_aggregate_csv,
    write_summary_json,
    write_trace_csv,
)
from utils.logger import logger


async def report_agent(state: ExperimentState) -> ExperimentState:
    """
    Report Agent - Emit result files.

    INPUT: state with traces (learner runs) or gap (oracle-only runs)
    OUTPUT: state with summaries and output_files populated
    """
    logger.info("Starting report agent")
    config = state["config"]
    out_dir = Path(config.output_dir)
    mdp = state["mdp"]
    assert mdp is not None

    try:
        if not state["traces"]:
            summary = summarize(None, state["config_hash"], config.seed, state["gap"])
            path = out_dir / f"oracle_{mdp.name}_{config.seed}.json"
            state["summaries"] = [summary]
            state["output_files"] = [str(write_summary_json(summary, path))]
        else:
            files, summaries = [], []
            for trace in state["traces"]:
                summary = summarize(trace, state["config_hash"], trace.seed, state["gap"])
                csv_path = write_trace_csv(trace, out_dir)
                json_path = csv_path.with_suffix(".json")
                files += [str(csv_path), str(write_summary_json(summary, json_path))]
                summaries.append(summary)
            if len(state["traces"]) > 1:
                first = state["traces"][0]
                stem = Path(trace_filename(first)).stem
                aggregate = write_aggregate_csv(state["traces"], out_dir / f"{stem}_aggregate.csv")
                files.append(str(aggregate))
            state["summaries"] = summaries
            state["output_files"] = files
    except OSError as e:
        logger.error(f"Report agent failed: {e}", exc_info=True)
        state["errors"].append(f"cannot write results to {out_dir}: {e}")
        state["exit_code"] = 1
        state["status"] = "failed"
        return state

    state["status"] = "complete"
    logger.info(f"Completed report agent: {len(state['output_files'])} file(s) in {out_dir}")
    return state
