from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, model_validator


class FamilyKind(str, Enum):
    POISSON = "poisson"
    GEOMETRIC = "geometric"
    NEGBIN = "negbin"


class PsdFamily(BaseModel):
    """A power-series family f_theta(k) = b_k theta^k / b(theta) on k = 0, 1, ..."""

    model_config = ConfigDict(frozen=True)

    kind: FamilyKind
    v: Optional[float] = None  # stopping parameter, negbin only

    @model_validator(mode="after")
    def check_stopping_parameter(self):
        if self.kind == FamilyKind.NEGBIN:
            if self.v is None or not self.v > 0:
                raise ValueError("negbin family needs a stopping parameter v > 0")
        elif self.v is not None:
            raise ValueError(f"{self.kind.value} family takes no stopping parameter")
        return self

    @property
    def R(self) -> float:
        return float("inf") if self.kind == FamilyKind.POISSON else 1.0

    @property
    def shape(self) -> float:
        """Second Beta parameter minus one of the dual density (1 for geometric, v for negbin)."""
        if self.kind == FamilyKind.GEOMETRIC:
            return 1.0
        if self.kind == FamilyKind.NEGBIN:
            return float(self.v)
        raise AttributeError("poisson family has no Beta dual")

    @classmethod
    def poisson(cls) -> "PsdFamily":
        return cls(kind=FamilyKind.POISSON)

    @classmethod
    def geometric(cls) -> "PsdFamily":
        return cls(kind=FamilyKind.GEOMETRIC)

    @classmethod
    def negbin(cls, v: float) -> "PsdFamily":
        return cls(kind=FamilyKind.NEGBIN, v=v)

    @classmethod
    def from_tag(cls, tag: str, v: Optional[float] = None) -> "PsdFamily":
        kind = FamilyKind(tag.lower())
        return cls(kind=kind, v=v if kind == FamilyKind.NEGBIN else None)


class DualKind(str, Enum):
    GAMMA = "gamma"
    BETA = "beta"


class DualDensity(BaseModel):
    """theta-density proportional to theta -> f_theta(k); Gamma(a, rate 1) or Beta(a, b)."""

    model_config = ConfigDict(frozen=True)

    kind: DualKind
    a: float
    b: float = 1.0


class TheoryConstants(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    support_bound: float
    delta0: float
    eta0: float
    d: int
    t0: float
    theta_tilde: float
    U: int
    W: int
    V: int
    A: float
    N: Optional[int] = None  # null when it exceeds the float range
    log_N: float
