"""
Synthetic data: the benchmark mixing distributions and the dependent
alternatives used to exercise the conditional independence test.
"""
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from app.domain.errors import DomainError
from app.domain.families import kernels
from app.domain.families.schemas import PsdFamily
from app.domain.mixtures.schemas import Dataset, MixingDistribution
from app.domain.synthetic.schemas import ScenarioConfig, ScenarioLabel

SQUARE_LOW, SQUARE_HIGH = 0.6, 0.9
SQUARE_POINTS = 11
SEGMENT_POINTS = 101

POISSON_MIXTURE_MEANS = (2.0, 4.0)
POISSON_MIXTURE_WEIGHTS = (2 / 3, 1 / 3)
GEOMETRIC_MIXTURE_PARAMETERS = (0.7, 0.9)
GEOMETRIC_MIXTURE_WEIGHTS = (1 / 3, 2 / 3)


def _square(mass: Fraction) -> List[Tuple[Tuple[float, float], Fraction]]:
    axis = np.linspace(SQUARE_LOW, SQUARE_HIGH, SQUARE_POINTS)
    share = mass / (SQUARE_POINTS * SQUARE_POINTS)
    return [((float(x), float(y)), share) for x in axis for y in axis]


def _segment(x: float, mass: Fraction) -> List[Tuple[Tuple[float, float], Fraction]]:
    axis = np.linspace(SQUARE_LOW, SQUARE_HIGH, SEGMENT_POINTS)
    share = mass / SEGMENT_POINTS
    return [((x, float(u)), share) for u in axis]


def _planar_atoms(label: ScenarioLabel, family: PsdFamily) -> List[Tuple[Tuple[float, float], Fraction]]:
    if label == ScenarioLabel.A:
        return [((0.7, 0.7), Fraction(1, 3)), ((0.9, 0.9), Fraction(2, 3))]
    if label == ScenarioLabel.B:
        return [((x, x), Fraction(i, 10)) for i, x in enumerate((0.6, 0.7, 0.8, 0.9), start=1)]
    if label == ScenarioLabel.C:
        return _square(Fraction(1))
    if label == ScenarioLabel.D:
        # success probability one; for finite radius it sits at parameter zero
        corner = 1.0 if np.isinf(family.R) else 0.0
        return [((corner, corner), Fraction(1, 3))] + _square(Fraction(2, 3))
    return _segment(0.7, Fraction(1, 3)) + _segment(0.9, Fraction(2, 3))


def scenario_mixing(config: ScenarioConfig) -> MixingDistribution:
    """Mixing distribution of a benchmark scenario; d = 4 repeats the planar coordinates as (x, y, x, y)."""
    atoms = _planar_atoms(config.label, config.family)
    total = sum(mass for _, mass in atoms)
    support = np.array([point * (config.d // 2) for point, _ in atoms], dtype=float)
    weights = np.array([float(mass / total) for _, mass in atoms])
    return MixingDistribution.from_arrays(support, weights)


def _check_beta(beta: float) -> None:
    if beta == 1:
        raise DomainError("beta = 1 gives a degenerate common-shock model")
    if not 0 <= beta < 1:
        raise DomainError("beta must lie in [0, 1)")


def _common_shock(lam, beta: float, rng: np.random.Generator) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    shared = rng.poisson(beta * lam)
    own = rng.poisson((1.0 - beta) * lam[..., None], size=lam.shape + (2,))
    return own + shared[..., None]


def sample_common_shock_poisson(lam: float, beta: float, n: int, rng: np.random.Generator) -> Dataset:
    """Y_j = Z_j + Z with Z ~ Poi(beta lam), Z_j ~ Poi((1 - beta) lam): Poi(lam) marginals, covariance beta lam."""
    _check_beta(beta)
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return Dataset(_common_shock(np.full(n, lam), beta, rng))


def sample_dependent_poisson_mixture(beta: float, n: int, rng: np.random.Generator) -> Dataset:
    _check_beta(beta)
    component = rng.choice(len(POISSON_MIXTURE_MEANS), size=n, p=POISSON_MIXTURE_WEIGHTS)
    return Dataset(_common_shock(np.asarray(POISSON_MIXTURE_MEANS)[component], beta, rng))


def _check_lambda(lam: float) -> None:
    if not lam >= 1:
        raise DomainError("the Gumbel parameter lambda must be at least 1")


def solve_w(v2, lam: float, iters: int = 200):
    """Solve w (1 - log(w) / lam) = v2 for w in (0, 1] by bisection on [1e-15, 1]."""
    _check_lambda(lam)
    v2 = np.asarray(v2, dtype=float)
    if np.any(~(v2 > 0)) or np.any(v2 > 1):
        raise DomainError("v2 must lie in (0, 1]")
    low = np.full(v2.shape, 1e-15)
    high = np.ones(v2.shape)
    for _ in range(iters):
        middle = 0.5 * (low + high)
        below = middle * (1.0 - np.log(middle) / lam) < v2
        low = np.where(below, middle, low)
        high = np.where(below, high, middle)
        if np.all(high - low <= 1e-17):
            break
    w = np.where(v2 == 1.0, 1.0, 0.5 * (low + high))
    return w.item() if w.ndim == 0 else w


def sample_gumbel_pairs(lam: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n draws from the Gumbel copula exp(-((-log u1)^lam + (-log u2)^lam)^(1/lam))."""
    _check_lambda(lam)
    v = rng.random((n, 2))
    v2 = np.where(v[:, 1] > 0, v[:, 1], np.nextafter(0.0, 1.0))
    log_w = np.log(solve_w(v2, lam))
    u1 = np.exp(v[:, 0] ** (1.0 / lam) * log_w)
    u2 = np.exp((1.0 - v[:, 0]) ** (1.0 / lam) * log_w)
    tiny = np.finfo(float).tiny
    return np.clip(np.column_stack([u1, u2]), tiny, np.nextafter(1.0, 0.0))


def sample_gumbel_pair(lam: float, rng: np.random.Generator) -> Tuple[float, float]:
    u1, u2 = sample_gumbel_pairs(lam, 1, rng)[0]
    return float(u1), float(u2)


def sample_dependent_geometric_mixture(lam: float, n: int, rng: np.random.Generator) -> Dataset:
    """Geometric mixture whose coordinates are coupled by a Gumbel copula inside each component."""
    _check_lambda(lam)
    component = rng.choice(len(GEOMETRIC_MIXTURE_PARAMETERS), size=n, p=GEOMETRIC_MIXTURE_WEIGHTS)
    theta = np.asarray(GEOMETRIC_MIXTURE_PARAMETERS)[component]
    u = sample_gumbel_pairs(lam, n, rng)
    return Dataset(kernels.quantile(PsdFamily.geometric(), theta[:, None], u))
