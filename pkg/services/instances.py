"""Benchmark instances: the delay-dichotomy MDP, random and chain families, JSON files."""
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

from models.aug import AugMdp, ExecutablePolicy
from models.channels import DelayModel, MissingModel
from models.errors import ConfigError, MdpValidationError, ModelError
from models.experiment import (
    ConstantDelaySpec,
    ExperimentConfig,
    GeometricDelaySpec,
    Impairment,
    InstanceSpec,
    TableDelaySpec,
)
from models.mdp import TabularMdp
from services.channels import constant_delay, geometric_delay, missing_model, table_delay
from services.mdp_core import validate
from utils.json_utils import read_json
from utils.logger import logger


def make_dichotomy_instance(d: int, horizon: int) -> Tuple[TabularMdp, DelayModel, DelayModel]:
    """
    Two-state instance where one extra step of delay costs half the value.

    Only step ``d`` pays: reward 1 iff the action matches the state. Kernels
    keep the state until step ``d`` and resample it uniformly right after.

    Returns:
        The MDP and constant-delay models with delays ``d`` and ``d+1``

    Raises:
        ModelError: unless ``0 < d`` and ``d + 1 < H``
    """
    if not 0 < d < horizon - 1:
        raise ModelError(f"dichotomy instance needs 0 < d < H - 1, got d={d}, H={horizon}")
    S = A = 2
    reward = np.zeros((horizon, S, A))
    reward[d] = np.eye(S)
    kernel = np.tile(np.eye(S)[None, :, None, :], (horizon - 1, 1, A, 1))
    kernel[d] = 0.5
    mdp = TabularMdp(
        reward=reward,
        kernel=kernel,
        initial_dist=np.full(S, 0.5),
        name=f"dichotomy_d{d}_H{horizon}",
    )
    return (
        mdp,
        constant_delay(d, horizon, S, A),
        constant_delay(d + 1, horizon, S, A),
    )


def random_instance(
    num_states: int,
    num_actions: int,
    horizon: int,
    seed: int,
    deterministic: bool = False,
) -> TabularMdp:
    """
    Random MDP: flat-Dirichlet kernel rows, uniform rewards, flat initial distribution.

    With ``deterministic`` every kernel row is a point mass at a random state.
    """
    rng = np.random.default_rng(seed)
    S, A, H = num_states, num_actions, horizon
    reward = rng.uniform(0.0, 1.0, size=(H, S, A))
    if deterministic:
        targets = rng.integers(0, S, size=(H - 1, S, A))
        kernel = np.eye(S)[targets]
    else:
        kernel = rng.dirichlet(np.ones(S), size=(H - 1, S, A))
    initial_dist = rng.dirichlet(np.ones(S))
    return TabularMdp(
        reward=reward,
        kernel=kernel,
        initial_dist=initial_dist,
        name=f"random_S{S}_A{A}_H{H}_seed{seed}",
    )


def chain_instance(num_states: int, num_actions: int, horizon: int, seed: int = 0) -> TabularMdp:
    """Deterministic chain: action ``a`` moves from ``s`` to ``(s + a) mod S``; random rewards."""
    rng = np.random.default_rng(seed)
    S, A, H = num_states, num_actions, horizon
    targets = (np.arange(S)[:, None] + np.arange(A)[None, :]) % S
    kernel = np.broadcast_to(np.eye(S)[targets], (H - 1, S, A, S)).copy()
    initial_dist = np.zeros(S)
    initial_dist[0] = 1.0
    return TabularMdp(
        reward=rng.uniform(0.0, 1.0, size=(H, S, A)),
        kernel=kernel,
        initial_dist=initial_dist,
        name=f"chain_S{S}_A{A}_H{H}",
    )


def random_geometric_delay(
    rng: np.random.Generator, horizon: int, num_states: int, num_actions: int
) -> DelayModel:
    return geometric_delay(float(rng.uniform(0.2, 1.0)), horizon, num_states, num_actions)


def random_executable_policy(aug: AugMdp, rng: np.random.Generator) -> ExecutablePolicy:
    """Stochastic executable policy with flat-Dirichlet action distributions."""
    matrices = [rng.dirichlet(np.ones(aug.num_actions), size=layer.size) for layer in aug.layers]
    return ExecutablePolicy.from_matrices(aug, matrices)


def instance_from_dict(data: Dict[str, Any], name: str = "instance") -> TabularMdp:
    """
    Build and validate a TabularMdp from its JSON form.

    Raises:
        MdpValidationError: on missing fields or violated invariants
    """
    required = ("S", "A", "H", "reward", "kernel", "initial_dist")
    missing = [key for key in required if key not in data]
    if missing:
        raise MdpValidationError(f"instance is missing fields: {', '.join(missing)}")
    S, A, H = int(data["S"]), int(data["A"]), int(data["H"])
    kernel = np.asarray(data["kernel"], dtype=float)
    if H == 1 and kernel.size == 0:
        kernel = np.zeros((0, S, A, S))
    mdp = TabularMdp(
        reward=np.asarray(data["reward"], dtype=float),
        kernel=kernel,
        initial_dist=np.asarray(data["initial_dist"], dtype=float),
        name=str(data.get("name", name)),
    )
    if mdp.reward.shape != (H, S, A):
        raise MdpValidationError(
            f"reward shape {mdp.reward.shape} does not match (H, S, A) = {(H, S, A)}"
        )
    validate(mdp)
    return mdp


def load_instance(file_path: str | Path) -> TabularMdp:
    """Load an instance file (0-based indices throughout)."""
    path = Path(file_path)
    mdp = instance_from_dict(read_json(path), name=path.stem)
    logger.info(
        f"Loaded instance {mdp.name}: S={mdp.num_states}, A={mdp.num_actions}, H={mdp.horizon}"
    )
    return mdp


def instance_to_dict(mdp: TabularMdp) -> Dict[str, Any]:
    return {
        "name": mdp.name,
        "S": mdp.num_states,
        "A": mdp.num_actions,
        "H": mdp.horizon,
        "reward": mdp.reward.tolist(),
        "kernel": mdp.kernel.tolist(),
        "initial_dist": mdp.initial_dist.tolist(),
    }


def builtin_instance(
    builtin: str,
    num_states: Optional[int] = None,
    num_actions: Optional[int] = None,
    horizon: int = 3,
    seed: int = 0,
    d: int = 1,
) -> TabularMdp:
    """Dispatch on a builtin family name."""
    if builtin == "dichotomy":
        return make_dichotomy_instance(d, horizon)[0]
    if num_states is None or num_actions is None:
        raise MdpValidationError(f"builtin '{builtin}' needs num_states and num_actions")
    if builtin == "random":
        return random_instance(num_states, num_actions, horizon, seed)
    if builtin == "chain":
        return chain_instance(num_states, num_actions, horizon, seed)
    raise MdpValidationError(f"unknown builtin instance '{builtin}'")


def resolve_instance(block: InstanceSpec) -> TabularMdp:
    """Build the MDP an experiment's instance block names."""
    if block.path is not None:
        try:
            return load_instance(block.path)
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read instance {block.path}: {e}") from e
    return builtin_instance(
        block.builtin or "",
        num_states=block.num_states,
        num_actions=block.num_actions,
        horizon=block.horizon,
        seed=block.seed,
        d=block.d,
    )


def resolve_impairment(
    block: Optional[Impairment], mdp: TabularMdp, default_delay: Optional[int] = None
) -> DelayModel | MissingModel:
    """
    Build the observation model an experiment's impairment block names.

    Without a block, a constant delay of ``default_delay`` is used.

    Raises:
        ModelError: on invalid parameters or when neither is given
    """
    H, S, A = mdp.horizon, mdp.num_states, mdp.num_actions
    if block is None:
        if default_delay is None:
            raise ModelError("no impairment configured")
        return constant_delay(default_delay, H, S, A)
    if isinstance(block, GeometricDelaySpec):
        return geometric_delay(block.p, H, S, A)
    if isinstance(block, ConstantDelaySpec):
        return constant_delay(block.d, H, S, A)
    if isinstance(block, TableDelaySpec):
        return table_delay(block.pmf, H, S, A, initial_delay=block.initial_delay)
    return missing_model(block.rates, H)


def resolve_experiment(config: ExperimentConfig) -> Tuple[TabularMdp, DelayModel | MissingModel]:
    """Instance and observation model of a config; 'dichotomy' defaults to its constant delay."""
    mdp = resolve_instance(config.instance)
    default_delay = config.instance.d if config.instance.builtin == "dichotomy" else None
    return mdp, resolve_impairment(config.impairment, mdp, default_delay)
