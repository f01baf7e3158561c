"""
Evaluation, sampling and tail diagnostics of conditionally independent PSD mixtures.
"""
import logging
import math
import string
from typing import List, Optional

import numpy as np
from scipy.special import logsumexp

from app.config import settings
from app.domain.errors import DomainError, ResourceLimitError
from app.domain.families import kernels
from app.domain.families.schemas import FamilyKind, PsdFamily, TheoryConstants
from app.domain.mixtures.schemas import Dataset, MixturePmf, TailBoundCheck

logger = logging.getLogger(__name__)


def component_log_pmf(family: PsdFamily, support: np.ndarray, points: np.ndarray) -> np.ndarray:
    """(u, m) matrix of log prod_j f_{theta_lj}(k_ij)."""
    support = np.asarray(support, dtype=float)
    points = np.asarray(points)
    return np.sum(kernels.log_pmf(family, support[None, :, :], points[:, None, :]), axis=-1)


def mixture_log_pmf(model: MixturePmf, points) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points))
    log_f = component_log_pmf(model.family, model.mixing.support_array(), points)
    with np.errstate(divide="ignore"):
        log_p = np.log(model.mixing.weight_array())
    return logsumexp(log_f + log_p[None, :], axis=1)


def mixture_pmf(model: MixturePmf, k):
    """pi(k) for one lattice point (a scalar when d = 1), or a vector of values for an (n, d) array."""
    k = np.asarray(k)
    values = np.exp(mixture_log_pmf(model, k.reshape(1, -1) if k.ndim <= 1 else k))
    return values.item() if k.ndim <= 1 else values


def box_tail(model: MixturePmf, K: int) -> float:
    """Mass outside the box {0..K}^d, i.e. 1 - box_mass, without cancellation."""
    if K < 0:
        return 1.0
    tails = kernels.sf(model.family, model.mixing.support_array(), K)
    inside = np.sum(np.log1p(-np.minimum(tails, 1.0)), axis=1)
    return float(np.dot(model.mixing.weight_array(), -np.expm1(inside)))


def box_mass(model: MixturePmf, K: int) -> float:
    if K < 0:
        return 0.0
    cdfs = kernels.cdf(model.family, model.mixing.support_array(), K)
    return float(np.dot(model.mixing.weight_array(), np.prod(cdfs, axis=1)))


def smallest_box(model: MixturePmf, threshold: float) -> int:
    """Smallest K >= 0 with box_tail(K) <= threshold."""
    if threshold >= 1:
        return 0
    K = 0
    while box_tail(model, K) > threshold:
        K += 1
        if K > settings.MAX_TAIL_SCAN:
            raise ResourceLimitError(f"tail mass stays above {threshold:g} up to K = {settings.MAX_TAIL_SCAN}")
    return K


def log_likelihood(model: MixturePmf, dataset: Dataset) -> float:
    """sum_i log pi(X_i); -inf (with the first offending row logged) on a zero-probability row."""
    if dataset.d != model.d:
        raise DomainError(f"dataset has {dataset.d} columns, model has dimension {model.d}")
    rows, counts = dataset.unique()
    log_pi = mixture_log_pmf(model, rows)
    if np.any(np.isneginf(log_pi)):
        row = zero_probability_row(model, dataset)
        logger.warning("observation at row %d has zero probability under the model", row)
        return -math.inf
    return float(np.dot(counts, log_pi))


def zero_probability_row(model: MixturePmf, dataset: Dataset) -> Optional[int]:
    log_pi = mixture_log_pmf(model, dataset.values)
    bad = np.flatnonzero(np.isneginf(log_pi))
    return int(bad[0]) if bad.size else None


def sample(model: MixturePmf, n: int, rng: np.random.Generator) -> Dataset:
    if n < 1:
        raise DomainError("sample size must be at least 1")
    weights = model.mixing.weight_array()
    index = rng.choice(model.mixing.m, size=n, p=weights / weights.sum())
    theta = model.mixing.support_array()[index]
    return Dataset(draw_marginals(model.family, theta, rng))


def draw_marginals(family: PsdFamily, theta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Independent draws X_ij ~ f_{theta_ij}."""
    if family.kind == FamilyKind.POISSON:
        return rng.poisson(theta)
    stop = 1.0 if family.kind == FamilyKind.GEOMETRIC else family.v
    return rng.negative_binomial(stop, 1.0 - theta)


def log_nd(n: int, d: int) -> float:
    if n * d < 3:
        raise DomainError("n * d must be at least 3")
    return math.log(n * d)


def tail_index_Kn(model: MixturePmf, n: int, d: Optional[int] = None) -> int:
    d = model.d if d is None else d
    threshold = log_nd(n, d) ** (2 + d) / n
    return smallest_box(model, threshold)


def axis_table(model: MixturePmf, K: int) -> np.ndarray:
    """(d, m, K+1) table of f_{theta_lj}(t) for t = 0..K."""
    support = model.mixing.support_array()
    t = np.arange(K + 1)
    return np.exp(kernels.log_pmf(model.family, support.T[:, :, None], t[None, None, :]))


def outer_combination(weights: np.ndarray, factors: List[np.ndarray]):
    """sum_l w_l (x)_j factors[j][l, :] as a tensor with one axis per factor."""
    if not factors:
        return float(np.sum(weights))
    letters = string.ascii_lowercase[: len(factors)]
    subscripts = "z," + ",".join(f"z{c}" for c in letters) + "->" + letters
    return np.einsum(subscripts, weights, *factors)


def box_slabs(model: MixturePmf, K: int):
    """Yield (t, values) with values[k_2, ..., k_d] = pi(t, k_2, ..., k_d) over the box."""
    table = axis_table(model, K)
    weights = model.mixing.weight_array()
    for t in range(K + 1):
        yield t, outer_combination(weights * table[0, :, t], list(table[1:]))


def tau_n(model: MixturePmf, Kn: int, constants: Optional[TheoryConstants] = None) -> float:
    """min of pi over {0..Kn}^d."""
    if Kn < 0:
        raise DomainError("Kn must be nonnegative")
    d = model.d
    size = (Kn + 1) ** d
    if size > settings.TAU_ENUMERATION_CAP:
        if constants is None or Kn < constants.W:
            raise ResourceLimitError(f"box of {size} lattice points is too large to enumerate")
        return corner_minimum(model, Kn, constants)
    return float(min(np.min(values) for _, values in box_slabs(model, Kn)))


def corner_minimum(model: MixturePmf, Kn: int, constants: TheoryConstants) -> float:
    """
    pi(Kn, ..., Kn) once it is certified as the minimum over {0..Kn}^d: every other
    vertex is strictly larger and pi strictly decreases along each edge into the
    corner from coordinate W on.
    """
    d = model.d
    corner = mixture_pmf(model, np.full(d, Kn))
    vertices = np.array(np.meshgrid(*[[0, Kn]] * d, indexing="ij")).reshape(d, -1).T
    others = vertices[np.any(vertices != Kn, axis=1)]
    if others.size and np.any(mixture_pmf(model, others) <= corner):
        raise ResourceLimitError("a box vertex does not exceed the corner value; the corner is not certified")
    start = min(constants.W, Kn)
    for j in range(d):
        edge = np.full((Kn - start + 1, d), Kn)
        edge[:, j] = np.arange(start, Kn + 1)
        if np.any(np.diff(mixture_pmf(model, edge)) >= 0):
            raise ResourceLimitError(f"pi is not strictly decreasing into the corner along coordinate {j + 1}")
    return corner


def tail_bound_check(model: MixturePmf, constants: TheoryConstants, K: int) -> TailBoundCheck:
    if K < max(constants.U, constants.W):
        raise DomainError(f"K must be at least max(U, W) = {max(constants.U, constants.W)}")
    if np.any(model.mixing.support_array() > constants.theta_tilde * (1 + 1e-12)):
        raise DomainError(f"model support leaves [0, {constants.theta_tilde}]^d")
    lhs = box_tail(model, K)
    rhs = constants.A * model.d * constants.t0 ** K
    return TailBoundCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs)


def zero_cell_bound(model: MixturePmf, K: int, n: int) -> float:
    """(K+1)^d (1 - pi(K,...,K))^n: bounds the chance that a cell of {0..K}^d goes unobserved."""
    corner = mixture_pmf(model, np.full(model.d, K))
    return float(math.exp(model.d * math.log(K + 1) + n * math.log1p(-corner)))


def rate_envelope(n: int, d: int) -> float:
    return log_nd(n, d) ** (1 + d / 2) / math.sqrt(n)
