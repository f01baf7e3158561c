from enum import Enum

from pydantic import BaseModel, ConfigDict, field_validator

from app.domain.families.schemas import PsdFamily


class ScenarioLabel(str, Enum):
    A = "a"  # two atoms on the diagonal
    B = "b"  # four atoms on the diagonal
    C = "c"  # uniform square, 11 x 11 grid
    D = "d"  # atom at the corner plus uniform square
    E = "e"  # two uniform segments, 101 points each


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: ScenarioLabel
    family: PsdFamily
    d: int = 2

    @field_validator("d")
    @classmethod
    def check_dimension(cls, d: int) -> int:
        if d not in (2, 4):
            raise ValueError("scenarios are defined for d = 2 and d = 4")
        return d


class DependentKind(str, Enum):
    POISSON = "poisson"  # common-shock bivariate Poisson mixture, dependence beta
    GEOMETRIC = "geometric"  # Gumbel-copula Geometric mixture, dependence lambda
