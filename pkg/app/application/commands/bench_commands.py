from typing import Optional

from pydantic import BaseModel

from app.domain.experiments.schemas import PowerRunSpec, RateRunSpec
from app.domain.families.schemas import PsdFamily
from app.domain.npmle.schemas import FitOptions


class BenchRateCommand(BaseModel):
    spec: RateRunSpec
    workers: Optional[int] = None
    output_path: Optional[str] = None
    manifest_path: Optional[str] = None


class BenchPowerCommand(BaseModel):
    spec: PowerRunSpec
    workers: Optional[int] = None
    output_path: Optional[str] = None
    manifest_path: Optional[str] = None


class BenchCvCommand(BaseModel):
    input_path: str
    family: PsdFamily
    repeats: Optional[int] = None
    seed: int = 0
    fit_options: Optional[FitOptions] = None
    eps_tail: Optional[float] = None
    workers: Optional[int] = None
    output_path: Optional[str] = None
    manifest_path: Optional[str] = None

