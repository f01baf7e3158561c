from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.config import settings
from app.domain.estimators.schemas import Metric
from app.domain.npmle.schemas import FitOptions

TEST_METRICS = (Metric.HELLINGER, Metric.L1, Metric.L2)


class TestOptions(BaseModel):
    __test__ = False  # not a pytest class

    model_config = ConfigDict(frozen=True)

    B: int = Field(default_factory=lambda: settings.BOOTSTRAP_B, ge=1)
    alpha: float = Field(default_factory=lambda: settings.ALPHA, gt=0, lt=1)
    metrics: List[Metric] = Field(default_factory=lambda: [Metric(m) for m in settings.METRICS])
    seed: int = Field(default=0, ge=0, lt=2**64)
    fit_options: FitOptions = Field(default_factory=FitOptions)
    eps_tail: Optional[float] = Field(default=None, gt=0)
    workers: int = Field(default_factory=lambda: settings.WORKERS)

    @field_validator("metrics")
    @classmethod
    def check_metrics(cls, metrics: List[Metric]) -> List[Metric]:
        if not metrics:
            raise ValueError("at least one metric is required")
        unsupported = [m.value for m in metrics if m not in TEST_METRICS]
        if unsupported:
            raise ValueError(f"metrics not available for the test: {', '.join(unsupported)}")
        return list(dict.fromkeys(metrics))


class FiveNumberSummary(BaseModel):
    min: float
    q1: float
    median: float
    q3: float
    max: float


class TestResult(BaseModel):
    __test__ = False

    model_config = ConfigDict(ser_json_inf_nan="constants")

    observed: Dict[str, float]
    boot: Dict[str, List[float]]
    quantile: Dict[str, float]
    p_value: Dict[str, float]
    reject: Dict[str, bool]
    summary: Dict[str, FiveNumberSummary]
    B: int
    alpha: float
    seed: int
    fit_converged: bool
    n_nonconverged: int
    nonconverged: List[int]  # replicate indices b (1-based) whose refit did not converge
