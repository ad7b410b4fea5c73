"""CSV and JSON emission for regret traces and run summaries."""
import csv
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from config.settings import FLOAT_DIGITS
from models.learner import RegretTrace
from utils.json_utils import dumps_stable, format_float
from utils.logger import logger

TRACE_COLUMNS = (
    "episode",
    "regret_increment",
    "cumulative_regret",
    "optimistic_value",
    "oracle_value",
    "seed",
)
AGGREGATE_COLUMNS = (
    "episode",
    "mean_cumulative",
    "q10_cumulative",
    "q50_cumulative",
    "q90_cumulative",
)


def _digits(digits: Optional[int]) -> int:
    return digits if digits is not None else FLOAT_DIGITS


def trace_filename(trace: RegretTrace) -> str:
    return f"{trace.algorithm}_{trace.instance}_{trace.seed}.csv"


def write_trace_csv(trace: RegretTrace, out_dir: str | Path, digits: Optional[int] = None) -> Path:
    """
    Write one row per episode with fixed significant-digit floats.

    Returns:
        Path of the written file
    """
    n = _digits(digits)
    path = Path(out_dir) / trace_filename(trace)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for record in trace.records:
            writer.writerow(
                [
                    record.episode,
                    format_float(record.regret_increment, n),
                    format_float(record.cumulative_regret, n),
                    format_float(record.optimistic_value, n),
                    format_float(record.oracle_value, n),
                    trace.seed,
                ]
            )
    logger.info(f"Wrote trace with {len(trace.records)} episodes to {path}")
    return path


def summarize(
    trace: Optional[RegretTrace],
    config_hash: str,
    seed: int,
    gap: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Summary record; learner fields are null for oracle-only runs."""
    summary: Dict[str, Any] = {"config_hash": config_hash, "seed": seed}
    if trace is not None:
        first, last = trace.decile_slopes()
        summary.update(
            final_regret=trace.final_regret,
            slope_first_decile=first,
            slope_last_decile=last,
            optimism_rate=trace.optimism_rate,
        )
    else:
        summary.update(
            final_regret=None, slope_first_decile=None, slope_last_decile=None, optimism_rate=None
        )
    if gap is not None:
        summary["gap"] = gap
    return summary


def write_summary_json(
    summary: Dict[str, Any], path: str | Path, digits: Optional[int] = None
) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dumps_stable(summary, _digits(digits)), encoding="utf-8")
    logger.info(f"Wrote summary to {target}")
    return target


def aggregate_curves(traces: Sequence[RegretTrace]) -> np.ndarray:
    """
    Per-episode mean and 10/50/90% quantiles of cumulative regret across runs.

    Returns:
        Array of shape (K, 5): episode, mean, q10, q50, q90

    Raises:
        ValueError: if the traces have different lengths
    """
    lengths = {len(t.records) for t in traces}
    if len(lengths) != 1:
        raise ValueError(f"cannot aggregate traces of different lengths: {sorted(lengths)}")
    curves = np.stack([t.cumulative for t in traces])
    quantiles = np.quantile(curves, [0.1, 0.5, 0.9], axis=0)
    episodes = np.arange(1, curves.shape[1] + 1)
    return np.column_stack([episodes, curves.mean(axis=0), quantiles.T])


def write_aggregate_csv(
    traces: List[RegretTrace], path: str | Path, digits: Optional[int] = None
) -> Path:
    n = _digits(digits)
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(AGGREGATE_COLUMNS)
        for row in aggregate_curves(traces):
            writer.writerow([int(row[0])] + [format_float(v, n) for v in row[1:]])
    logger.info(f"Wrote aggregate of {len(traces)} runs to {target}")
    return target
