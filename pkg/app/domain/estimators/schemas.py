from dataclasses import dataclass, field
from enum import Enum
from typing import Dict

import numpy as np
from pydantic import BaseModel

from app.domain.mixtures.schemas import Dataset, LatticePoint, MixturePmf


class Metric(str, Enum):
    HELLINGER = "hellinger"
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"


@dataclass(frozen=True)
class EmpiricalPmf:
    """Relative frequencies of the observed lattice points."""

    counts: Dict[LatticePoint, int]
    n: int
    d: int
    rows: np.ndarray = field(init=False, repr=False, compare=False)
    frequencies: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if any(c <= 0 for c in self.counts.values()) or sum(self.counts.values()) != self.n:
            raise ValueError("counts must be positive and add up to n")
        keys = sorted(self.counts)
        object.__setattr__(self, "rows", np.asarray(keys, dtype=np.int64).reshape(len(keys), self.d))
        object.__setattr__(self, "frequencies", np.asarray([self.counts[k] for k in keys], dtype=float))

    @classmethod
    def from_dataset(cls, dataset: Dataset) -> "EmpiricalPmf":
        rows, counts = dataset.unique()
        table = {tuple(int(c) for c in row): int(count) for row, count in zip(rows, counts)}
        return cls(counts=table, n=dataset.n, d=dataset.d)

    @property
    def masses(self) -> np.ndarray:
        return self.frequencies / self.n

    def mass(self, k) -> float:
        return self.counts.get(tuple(int(c) for c in k), 0) / self.n

    @property
    def max_observation(self) -> int:
        return int(self.rows.max())

    def box_mass(self, K: int) -> float:
        inside = np.all(self.rows <= K, axis=1)
        return float(np.sum(self.frequencies[inside])) / self.n


@dataclass(frozen=True)
class HybridPmf:
    """Empirical masses inside {0..k_tilde}^d, fitted masses outside, renormalized by s_tilde."""

    empirical: EmpiricalPmf
    fitted: MixturePmf
    k_tilde: int
    s_tilde: float

    @property
    def d(self) -> int:
        return self.empirical.d


class DistanceResult(BaseModel):
    metric: Metric
    value: float
    truncation_bound: float
    box: int  # sums run over {0..box}^d
