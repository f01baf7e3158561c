from typing import Optional

from pydantic import BaseModel, Field, model_validator

from app.domain.families.schemas import PsdFamily
from app.domain.synthetic.schemas import DependentKind, ScenarioLabel


class SimulateCommand(BaseModel):
    """Exactly one of scenario or dependent must be set."""

    scenario: Optional[ScenarioLabel] = None
    family: Optional[PsdFamily] = None
    d: int = 2
    dependent: Optional[DependentKind] = None
    level: Optional[float] = None  # beta or lambda
    n: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)
    output_path: Optional[str] = None

    @model_validator(mode="after")
    def check_generator(self):
        if (self.scenario is None) == (self.dependent is None):
            raise ValueError("choose either a scenario or a dependent generator")
        if self.scenario is not None and self.family is None:
            raise ValueError("scenario data needs a family")
        if self.dependent is not None and self.level is None:
            raise ValueError("dependent data needs a dependence level")
        return self
