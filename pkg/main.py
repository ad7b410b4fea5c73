"""Command-line entry point for the impaired-observation RL toolkit."""
import argparse
import asyncio
import sys
from typing import Any, Dict, List, NoReturn, Optional

from config.settings import FLOAT_DIGITS, load_settings
from models.channels import DelayModel
from models.errors import ConfigError, ImpairedRLError, ModelError
from models.experiment import ExperimentConfig
from services.aug import build_delayed_aug, build_delayed_aug_past, build_missing_aug, dump_aug_json
from services.channels import describe
from services.instances import load_instance, resolve_experiment
from services.oracle import dichotomy_table, gap_bound
from utils.json_utils import dumps_stable, format_float
from utils.logger import logger
from workflows.experiment_workflow import run_experiment

BENCH_COLUMNS = ("d", "H", "v_nodelay", "v_delay_d", "v_delay_d_plus_1", "gap_d", "gap_d_plus_1")
OVERRIDABLE = (
    "seed",
    "episodes",
    "output_dir",
    "aug_state_cap",
    "algorithm",
    "replications",
    "c",
    "gamma",
)


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors are config errors (exit 1); exit 2 is reserved for resource caps."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Experiment config JSON file")
    common.add_argument("--seed", type=int, help="Override the config seed")
    common.add_argument("--episodes", type=int, help="Override the number of episodes K")
    common.add_argument("--out", dest="output_dir", help="Override the output directory")
    common.add_argument(
        "--aug-state-cap", dest="aug_state_cap", type=int, help="Augmented state-action cap"
    )

    parser = _ArgumentParser(description="Tabular RL under delayed or missing observations")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    run = sub.add_parser("run", parents=[common], help="Run one experiment")
    run.add_argument("--algorithm", choices=["alg1", "alg2", "alg3", "oracle-only"])
    run.add_argument("--replications", type=int, help="Independent seeded runs seed..seed+N-1")
    run.add_argument("--c", type=float, help="Bonus multiplier")
    run.add_argument("--gamma", type=float, help="Failure probability")

    sub.add_parser("gap", parents=[common], help="Print the executable-policy gap report")

    bench = sub.add_parser(
        "bench-dichotomy", aliases=["bench-prop3"], help="Print the delay dichotomy table"
    )
    bench.add_argument("--max-d", type=int, default=3, help="Largest delay d in the table")

    dump = sub.add_parser("dump-aug", parents=[common], help="Print the augmented MDP as JSON")
    dump.add_argument("--variant", choices=["expected", "past"], default="expected")

    lint = sub.add_parser("validate", help="Check a config or an instance file")
    source = lint.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="Experiment config JSON file")
    source.add_argument("--instance", help="Instance JSON file")
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides: Dict[str, Any] = {k: getattr(args, k, None) for k in OVERRIDABLE}
    return ExperimentConfig.from_file(args.config, overrides)


def _run(args: argparse.Namespace) -> int:
    config = _load_config(args)
    result = asyncio.run(run_experiment(config))
    if result["status"] == "failed":
        for error in result["errors"]:
            logger.error(error)
        return result["exit_code"] or 1
    summaries = result["summaries"]
    payload = summaries[0] if len(summaries) == 1 else summaries
    sys.stdout.write(dumps_stable(payload, FLOAT_DIGITS))
    return 0


def _gap(args: argparse.Namespace) -> int:
    config = _load_config(args)
    mdp, model = resolve_experiment(config)
    if not isinstance(model, DelayModel):
        raise ModelError("gap reports need a delay model")
    report = gap_bound(mdp, model, config.aug_state_cap)
    sys.stdout.write(dumps_stable(report.model_dump(), FLOAT_DIGITS))
    return 0


def _bench_dichotomy(args: argparse.Namespace) -> int:
    digits = FLOAT_DIGITS
    rows: List[Dict[str, float]] = dichotomy_table(range(1, args.max_d + 1))
    print(",".join(BENCH_COLUMNS))
    for row in rows:
        cells = [
            str(row[c]) if c in ("d", "H") else format_float(row[c], digits) for c in BENCH_COLUMNS
        ]
        print(",".join(cells))
    return 0


def _dump_aug(args: argparse.Namespace) -> int:
    config = _load_config(args)
    mdp, model = resolve_experiment(config)
    if not isinstance(model, DelayModel):
        aug = build_missing_aug(mdp, model, config.aug_state_cap)
    elif args.variant == "past":
        aug = build_delayed_aug_past(mdp, model, config.aug_state_cap)
    else:
        aug = build_delayed_aug(mdp, model, config.aug_state_cap)
    sys.stdout.write(dumps_stable(dump_aug_json(aug), FLOAT_DIGITS))
    return 0


def _validate(args: argparse.Namespace) -> int:
    if args.instance is not None:
        try:
            mdp = load_instance(args.instance)
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read instance {args.instance}: {e}") from e
        print(f"ok: {mdp.name} (S={mdp.num_states}, A={mdp.num_actions}, H={mdp.horizon})")
        return 0
    config = ExperimentConfig.from_file(args.config)
    mdp, model = resolve_experiment(config)
    print(f"ok: {config.algorithm} on {mdp.name}, {describe(model)}")
    return 0


COMMANDS = {
    "run": _run,
    "gap": _gap,
    "bench-dichotomy": _bench_dichotomy,
    "bench-prop3": _bench_dichotomy,
    "dump-aug": _dump_aug,
    "validate": _validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the application."""
    args = _build_parser().parse_args(argv)
    load_settings()
    try:
        return COMMANDS[args.command](args)
    except ImpairedRLError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
