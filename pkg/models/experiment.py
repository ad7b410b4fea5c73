"""Experiment configuration loaded from one JSON file plus CLI overrides."""
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from models.errors import ConfigError

Algorithm = Literal["alg1", "alg2", "alg3", "oracle-only"]


class InstanceSpec(BaseModel):
    """Either a builtin family or a path to an instance file."""

    model_config = ConfigDict(extra="forbid")

    builtin: Optional[Literal["dichotomy", "random", "chain"]] = None
    path: Optional[str] = None
    num_states: Optional[int] = Field(default=None, gt=0)
    num_actions: Optional[int] = Field(default=None, gt=0)
    horizon: int = Field(default=3, gt=0)
    seed: int = 0
    d: int = Field(default=1, ge=0)

    @model_validator(mode="after")
    def _one_source(self) -> "InstanceSpec":
        if (self.builtin is None) == (self.path is None):
            raise ValueError("instance needs exactly one of 'builtin' or 'path'")
        sized = self.num_states is not None and self.num_actions is not None
        if self.builtin in ("random", "chain") and not sized:
            raise ValueError(f"builtin '{self.builtin}' needs num_states and num_actions")
        return self


class GeometricDelaySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["geometric"]
    p: float = Field(gt=0.0, le=1.0)


class ConstantDelaySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["constant"]
    d: int = Field(ge=0)


class TableDelaySpec(BaseModel):
    """Shared pmf vector or a full ``[h][s][a][Δ]`` table."""

    model_config = ConfigDict(extra="forbid")

    type: Literal["table"]
    pmf: List[Any]
    initial_delay: int = Field(default=0, ge=0)


class MissingSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    type: Literal["missing"]
    rates: Union[float, List[float]] = Field(alias="lambda")


Impairment = Annotated[
    Union[GeometricDelaySpec, ConstantDelaySpec, TableDelaySpec, MissingSpec],
    Field(discriminator="type"),
]

DELAY_TYPES = ("geometric", "constant", "table")


class ExperimentConfig(BaseModel):
    """One experiment: instance, impairment, algorithm and run parameters."""

    model_config = ConfigDict(extra="forbid")

    instance: InstanceSpec
    impairment: Optional[Impairment] = None
    algorithm: Algorithm = "alg1"
    episodes: int = Field(default=1000, ge=1)
    gamma: float = Field(default=0.1, gt=0.0, lt=1.0)
    c: float = Field(default=1.0, gt=0.0)
    seed: int = 0
    output_dir: str = "results"
    aug_state_cap: Optional[int] = Field(default=None, gt=0)
    replications: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _compatible(self) -> "ExperimentConfig":
        kind = self.impairment.type if self.impairment is not None else None
        if self.algorithm == "alg1" and kind not in DELAY_TYPES:
            raise ValueError(f"alg1 needs a delay model, got {kind}")
        if self.algorithm in ("alg2", "alg3") and kind != "missing":
            raise ValueError(f"{self.algorithm} needs a missing-observation model, got {kind}")
        if self.algorithm == "oracle-only":
            if kind == "missing":
                raise ValueError("oracle-only gap reports need a delay model")
            if kind is None and self.instance.builtin != "dichotomy":
                raise ValueError("oracle-only needs a delay model unless the instance is dichotomy")
        return self

    def hash_payload(self) -> Dict[str, Any]:
        """Fields that determine the results; output location and fan-out excluded."""
        return self.model_dump(
            mode="json", by_alias=True, exclude={"output_dir", "replications"}
        )

    @classmethod
    def from_file(
        cls, file_path: str | Path, overrides: Optional[Dict[str, Any]] = None
    ) -> "ExperimentConfig":
        """
        Load a config file and apply CLI overrides (``None`` values are ignored).

        Raises:
            ConfigError: if the file is unreadable or validation fails
        """
        from utils.json_utils import read_json

        try:
            data = read_json(file_path)
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read config {file_path}: {e}") from e
        return cls.from_dict(data, overrides)

    @classmethod
    def from_dict(
        cls, data: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None
    ) -> "ExperimentConfig":
        merged = dict(data)
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
        try:
            return cls.model_validate(merged)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
                for err in e.errors()
            )
            raise ConfigError(f"invalid experiment config: {problems}") from e
