from typing import List, Optional

from pydantic import BaseModel, Field

from app.domain.estimators.schemas import Metric
from app.domain.families.schemas import PsdFamily
from app.domain.npmle.schemas import FitOptions


class FitCommand(BaseModel):
    input_path: str
    family: PsdFamily
    options: FitOptions = Field(default_factory=FitOptions)
    output_path: Optional[str] = None


class EvaluateCommand(BaseModel):
    model_path: str
    data_path: Optional[str] = None
    reference_path: Optional[str] = None
    metrics: List[Metric] = Field(default_factory=lambda: list(Metric))
    eps_tail: Optional[float] = Field(default=None, gt=0)
    certify_points: Optional[int] = Field(default=None, ge=1)
    certify_seed: int = Field(default=0, ge=0, lt=2**64)
    support_bound: Optional[float] = Field(default=None, gt=0)
    delta0: Optional[float] = Field(default=None, gt=0)
    eta0: Optional[float] = Field(default=None, gt=0, lt=1)
    output_path: Optional[str] = None
