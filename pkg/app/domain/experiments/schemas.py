import hashlib
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings
from app.domain.estimators.schemas import Metric
from app.domain.families.schemas import PsdFamily
from app.domain.npmle.schemas import FitOptions
from app.domain.synthetic.schemas import DependentKind, ScenarioLabel

ESTIMATORS = ("Empirical", "Hybrid", "MLE")
CV_METRICS = (Metric.HELLINGER, Metric.L2, Metric.L1)


class RunSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    def spec_hash(self) -> str:
        """sha256 of the canonical JSON form of the spec."""
        return hashlib.sha256(self.model_dump_json().encode()).hexdigest()


class RateRunSpec(RunSpec):
    label: ScenarioLabel
    family: PsdFamily
    d: int = 2
    n_grid: Optional[List[int]] = None  # None: desk-scale grid for d
    replications: int = Field(default_factory=lambda: settings.RATE_REPLICATIONS, ge=1)
    metrics: List[Metric] = Field(default_factory=lambda: [Metric.HELLINGER, Metric.L1, Metric.L2])
    seed: int = Field(default=0, ge=0, lt=2**64)
    fit_options: FitOptions = Field(default_factory=FitOptions)
    eps_tail: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def fill_grid(self):
        if self.n_grid is None:
            grid = settings.RATE_N_GRID_2D if self.d == 2 else settings.RATE_N_GRID_4D
            object.__setattr__(self, "n_grid", list(grid))
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n grid must be strictly increasing")
        if self.n_grid[0] < 2:
            raise ValueError("sample sizes must be at least 2")
        return self


class PowerRunSpec(RunSpec):
    kind: DependentKind
    levels: Optional[List[float]] = None  # beta (poisson) or lambda (geometric) values
    replications: int = Field(default_factory=lambda: settings.POWER_REPLICATIONS, ge=1)
    B: int = Field(default_factory=lambda: settings.POWER_B, ge=1)
    alpha: float = Field(default_factory=lambda: settings.ALPHA, gt=0, lt=1)
    n: int = Field(default_factory=lambda: settings.POWER_N, ge=2)
    metrics: List[Metric] = Field(default_factory=lambda: [Metric.HELLINGER, Metric.L1, Metric.L2])
    seed: int = Field(default=0, ge=0, lt=2**64)
    fit_options: FitOptions = Field(default_factory=FitOptions)

    @model_validator(mode="after")
    def check_levels(self):
        if self.levels is None:
            levels = settings.POWER_BETAS if self.kind == DependentKind.POISSON else settings.POWER_LAMBDAS
            object.__setattr__(self, "levels", list(levels))
        if self.kind == DependentKind.POISSON and any(not 0 <= b < 1 for b in self.levels):
            raise ValueError("beta levels must lie in [0, 1)")
        if self.kind == DependentKind.GEOMETRIC and any(not lam >= 1 for lam in self.levels):
            raise ValueError("lambda levels must be at least 1")
        return self


class CvRunSpec(RunSpec):
    family: PsdFamily
    repeats: int = Field(default_factory=lambda: settings.CV_REPEATS, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    n: int
    d: int
    data_digest: str  # sha256 of the dataset values
    fit_options: FitOptions = Field(default_factory=FitOptions)
    eps_tail: Optional[float] = Field(default=None, gt=0)

    @field_validator("n")
    @classmethod
    def check_size(cls, n: int) -> int:
        if n < 4:
            raise ValueError("cross-validation needs at least 4 rows")
        return n
