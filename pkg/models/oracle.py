"""Oracle report types."""
from dataclasses import dataclass
from typing import Dict, List

from pydantic import BaseModel, Field

from models.aug import AugState


@dataclass
class VisitationMeasure:
    """``rho[h][τ]``: probability of being at augmented state τ at step h."""

    rho: List[Dict[AugState, float]]

    def layer_mass(self, h: int) -> float:
        return float(sum(self.rho[h].values()))


class GapReport(BaseModel):
    """Exact optimality gap of executable policies and its per-step bound terms."""

    exact_gap: float
    bound: float
    e1: List[float] = Field(default_factory=list)
    e2: List[float] = Field(default_factory=list)
    v_nodelay: float
    v_delay: float
