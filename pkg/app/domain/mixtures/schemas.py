from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from app.domain.errors import DomainError
from app.domain.families.schemas import PsdFamily

LatticePoint = Tuple[int, ...]


class MixingDistribution(BaseModel):
    """A discrete mixing distribution Q: m support points in [0, R)^d with weights."""

    model_config = ConfigDict(frozen=True)

    dim: int
    support: List[List[float]]
    weights: List[float]

    @field_validator("weights")
    @classmethod
    def check_weights(cls, weights: List[float]) -> List[float]:
        if not weights:
            raise ValueError("mixing distribution needs at least one support point")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(weights)!r}")
        return weights

    @model_validator(mode="after")
    def check_support(self):
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        if len(self.support) != len(self.weights):
            raise ValueError("support and weights differ in length")
        for point in self.support:
            if len(point) != self.dim:
                raise ValueError(f"support point {point} is not {self.dim}-dimensional")
            if any(not c >= 0 for c in point):
                raise ValueError("support coordinates must be nonnegative")
        return self

    @property
    def m(self) -> int:
        return len(self.weights)

    def support_array(self) -> np.ndarray:
        return np.asarray(self.support, dtype=float).reshape(self.m, self.dim)

    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @classmethod
    def from_arrays(cls, support: np.ndarray, weights: np.ndarray) -> "MixingDistribution":
        support = np.atleast_2d(np.asarray(support, dtype=float))
        weights = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        weights = weights / weights.sum()
        return cls(dim=support.shape[1], support=support.tolist(), weights=weights.tolist())


class MixturePmf(BaseModel):
    """pi(k) = sum_l p_l prod_j f_{theta_lj}(k_j)."""

    model_config = ConfigDict(frozen=True)

    family: PsdFamily
    mixing: MixingDistribution

    @model_validator(mode="after")
    def check_radius(self):
        if any(c >= self.family.R for point in self.mixing.support for c in point):
            raise ValueError(f"support coordinates must lie below R = {self.family.R}")
        return self

    @property
    def d(self) -> int:
        return self.mixing.dim


@dataclass(frozen=True)
class Dataset:
    """n x d nonnegative integer counts."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DomainError("a dataset needs at least one row and one column")
        if not np.issubdtype(values.dtype, np.integer):
            if not np.all(np.isfinite(values)) or np.any(values != np.round(values)):
                raise DomainError("dataset entries must be integers")
        values = values.astype(np.int64)
        if np.any(values < 0):
            raise DomainError("dataset entries must be nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def unique(self) -> Tuple[np.ndarray, np.ndarray]:
        """Distinct rows (lexicographic order) and their multiplicities."""
        rows, counts = np.unique(self.values, axis=0, return_counts=True)
        return rows, counts.astype(float)

    def subset(self, index: np.ndarray) -> "Dataset":
        return Dataset(self.values[np.asarray(index)])

    def concat(self, other: "Dataset") -> "Dataset":
        return Dataset(np.vstack([self.values, other.values]))


class TailBoundCheck(BaseModel):
    lhs: float
    rhs: float
    holds: bool
