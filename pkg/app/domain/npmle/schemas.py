from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.config import settings
from app.domain.families.schemas import DualKind
from app.domain.mixtures.schemas import MixturePmf


class FitOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    grad_tol: float = Field(default_factory=lambda: settings.GRAD_TOL, gt=0)
    max_outer_iters: int = Field(default_factory=lambda: settings.MAX_OUTER_ITERS, ge=0)
    grid_size: int = Field(default_factory=lambda: settings.GRID_SIZE, ge=1)
    modal_em_iters: int = Field(default_factory=lambda: settings.MODAL_EM_ITERS, ge=0)
    prune_tol: float = Field(default_factory=lambda: settings.PRUNE_TOL, gt=0)
    merge_radius: Optional[float] = Field(default=None, gt=0)  # None: 1e-6 * (1 + largest coordinate)
    em_polish_iters: int = Field(default_factory=lambda: settings.EM_POLISH_ITERS, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    candidate_cap: Optional[float] = Field(default=None, gt=0)  # Poisson only


class TraceEntry(BaseModel):
    loglik: float
    support_size: int


class FitResult(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    model: MixturePmf
    loglik: float
    sup_gradient_normalized: float
    outer_iters: int
    converged: bool
    trace: List[TraceEntry]
    seed: int
    options: FitOptions


class Certificate(BaseModel):
    """First-order optimality check of a fitted mixing distribution."""

    grid_sup: float  # max d(theta; Q)/n over the quasi-random grid
    support_sup: float  # max |d(theta_l; Q)|/n over support points with non-negligible weight
    n_points: int


@dataclass(frozen=True)
class DualProduct:
    """Per-row product of coordinate dual densities g_{k_ij}; a and b are (u, d) arrays."""

    kind: DualKind
    a: np.ndarray
    b: np.ndarray

    @property
    def size(self) -> int:
        return self.a.shape[0]
