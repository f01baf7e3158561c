"""
Distances between lattice pmfs over a truncated box {0..K}^d.

A pmf handle is a fitted MixturePmf, an EmpiricalPmf or a HybridPmf. The box
is the smallest one leaving at most eps_tail of each pmf outside it, and the
neglected mass is turned into an explicit bound on the truncation error.
Sums are taken slab by slab (first coordinate fixed) and combined with
compensated summation, so the result does not depend on slab order.
"""
import logging
import math
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from app.config import settings
from app.domain.errors import DomainError, ResourceLimitError
from app.domain.estimators.schemas import DistanceResult, EmpiricalPmf, HybridPmf, Metric
from app.domain.mixtures.model import axis_table, box_tail, outer_combination, smallest_box
from app.domain.mixtures.schemas import MixturePmf

logger = logging.getLogger(__name__)

PmfHandle = Union[MixturePmf, EmpiricalPmf, HybridPmf]


def default_eps_tail(d: int) -> float:
    return settings.EPS_TAIL if d < 4 else settings.EPS_TAIL_HIGH_DIM


def tail_mass(pmf: PmfHandle, K: int) -> float:
    """Mass outside {0..K}^d."""
    if isinstance(pmf, MixturePmf):
        return box_tail(pmf, K)
    if isinstance(pmf, EmpiricalPmf):
        return 1.0 - pmf.box_mass(K) if K < pmf.max_observation else 0.0
    if K < pmf.k_tilde:
        raise DomainError("hybrid tails are only available for boxes containing the empirical part")
    return box_tail(pmf.fitted, K) / pmf.s_tilde


def covering_box(pmf: PmfHandle, eps_tail: float) -> int:
    """Smallest K with tail_mass(K) <= eps_tail."""
    if isinstance(pmf, MixturePmf):
        return smallest_box(pmf, eps_tail)
    if isinstance(pmf, EmpiricalPmf):
        return pmf.max_observation
    return max(pmf.k_tilde, smallest_box(pmf.fitted, eps_tail * pmf.s_tilde))


def _empirical_slabs(pmf: EmpiricalPmf, K: int, scale: float = 1.0) -> Iterator[Tuple[int, np.ndarray]]:
    d = pmf.d
    inside = np.all(pmf.rows <= K, axis=1)
    rows, masses = pmf.rows[inside], pmf.masses[inside] * scale
    for t in range(K + 1):
        here = rows[:, 0] == t
        slab = np.zeros((K + 1,) * (d - 1))
        if d == 1:
            slab[()] = masses[here].sum()
        else:
            np.add.at(slab, tuple(rows[here, 1:].T), masses[here])
        yield t, slab


def _mixture_slabs(pmf: MixturePmf, K: int, scale: float = 1.0) -> Iterator[Tuple[int, np.ndarray]]:
    table = axis_table(pmf, K)
    weights = pmf.mixing.weight_array() * scale
    for t in range(K + 1):
        yield t, np.asarray(outer_combination(weights * table[0, :, t], list(table[1:])), dtype=float)


def _hybrid_slabs(pmf: HybridPmf, K: int) -> Iterator[Tuple[int, np.ndarray]]:
    scale = 1.0 / pmf.s_tilde
    inner = (slice(0, pmf.k_tilde + 1),) * (pmf.d - 1)
    empirical_slabs = _empirical_slabs(pmf.empirical, pmf.k_tilde, scale)
    for t, slab in _mixture_slabs(pmf.fitted, K, scale):
        if t <= pmf.k_tilde:
            _, empirical_slab = next(empirical_slabs)
            slab[inner] = empirical_slab
        yield t, slab


def slabs(pmf: PmfHandle, K: int) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield (t, values) with values[k_2, ..., k_d] = p(t, k_2, ..., k_d) for t = 0..K."""
    if isinstance(pmf, MixturePmf):
        return _mixture_slabs(pmf, K)
    if isinstance(pmf, EmpiricalPmf):
        return _empirical_slabs(pmf, K)
    return _hybrid_slabs(pmf, K)


def distance(p: PmfHandle, q: PmfHandle, metric: Union[Metric, str], eps_tail: Optional[float] = None) -> DistanceResult:
    """
    Hellinger (h, with h^2 = 1/2 sum (sqrt p - sqrt q)^2), l1, l2 or linf distance.

    truncation_bound dominates |value - exact value|.
    """
    metric = Metric(metric)
    d = p.d
    if q.d != d:
        raise DomainError("pmfs disagree on the dimension")
    eps_tail = default_eps_tail(d) if eps_tail is None else eps_tail
    if not eps_tail > 0:
        raise DomainError("eps_tail must be positive")

    K = max(covering_box(p, eps_tail), covering_box(q, eps_tail))
    if (K + 1) ** d > settings.MAX_BOX_POINTS:
        raise ResourceLimitError(f"box {{0..{K}}}^{d} exceeds {settings.MAX_BOX_POINTS} lattice points")
    logger.debug("%s distance over {0..%d}^%d", metric.value, K, d)

    partial = []
    for (_, p_slab), (_, q_slab) in zip(slabs(p, K), slabs(q, K)):
        if metric == Metric.HELLINGER:
            partial.append(float(np.sum((np.sqrt(p_slab) - np.sqrt(q_slab)) ** 2)))
        elif metric == Metric.L1:
            partial.append(float(np.sum(np.abs(p_slab - q_slab))))
        elif metric == Metric.L2:
            partial.append(float(np.sum((p_slab - q_slab) ** 2)))
        else:
            partial.append(float(np.max(np.abs(p_slab - q_slab))))

    tails = tail_mass(p, K) + tail_mass(q, K)
    if metric == Metric.HELLINGER:
        h2 = 0.5 * math.fsum(partial)
        value = math.sqrt(h2)
        bound = math.sqrt(h2 + 0.5 * tails) - value
    elif metric == Metric.L1:
        value, bound = math.fsum(partial), tails
    elif metric == Metric.L2:
        value, bound = math.sqrt(math.fsum(partial)), tails
    else:
        value, bound = max(partial), max(tail_mass(p, K), tail_mass(q, K))
    return DistanceResult(metric=metric, value=value, truncation_bound=bound, box=K)
