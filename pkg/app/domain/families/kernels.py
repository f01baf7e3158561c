"""
Exact kernels for the Poisson, Geometric and Negative Binomial power-series families.

Every kernel accepts scalars or numpy arrays (broadcast together) and returns a
Python float for scalar input. Logs go through log-gamma so non-integer
stopping parameters are handled exactly.
"""
import logging
import math
from typing import Tuple, Union

import numpy as np
from scipy import special, stats

from app.config import settings
from app.domain.errors import DomainError, ResourceLimitError
from app.domain.families.schemas import DualDensity, DualKind, FamilyKind, PsdFamily, TheoryConstants

logger = logging.getLogger(__name__)

ArrayLike = Union[float, int, np.ndarray]


def _out(value):
    value = np.asarray(value)
    return value.item() if value.ndim == 0 else value


def _check_theta(family: PsdFamily, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if np.any(~(theta >= 0)) or np.any(theta >= family.R):
        raise DomainError(f"theta must lie in [0, {family.R}) for the {family.kind.value} family")
    return theta


def _check_k(k) -> np.ndarray:
    k = np.asarray(k)
    if np.any(k < 0):
        raise DomainError("counts must be nonnegative")
    return k


def log_coefficient(family: PsdFamily, k) -> np.ndarray:
    """log b_k."""
    k = np.asarray(k, dtype=float)
    if family.kind == FamilyKind.POISSON:
        return -special.gammaln(k + 1.0)
    if family.kind == FamilyKind.GEOMETRIC:
        return np.zeros_like(k)
    v = family.v
    return special.gammaln(k + v) - special.gammaln(v) - special.gammaln(k + 1.0)


def log_normalizer(family: PsdFamily, theta) -> np.ndarray:
    """log b(theta)."""
    theta = np.asarray(theta, dtype=float)
    if family.kind == FamilyKind.POISSON:
        return theta
    if family.kind == FamilyKind.GEOMETRIC:
        return -np.log1p(-theta)
    return -family.v * np.log1p(-theta)


def log_pmf(family: PsdFamily, theta: ArrayLike, k: ArrayLike):
    """log f_theta(k); -inf when theta = 0 and k > 0."""
    theta = _check_theta(family, theta)
    k = _check_k(k)
    value = log_coefficient(family, k) + special.xlogy(k, theta) - log_normalizer(family, theta)
    return _out(value)


def pmf(family: PsdFamily, theta: ArrayLike, k: ArrayLike):
    return _out(np.exp(log_pmf(family, theta, k)))


def _frozen(family: PsdFamily, theta: np.ndarray):
    if family.kind == FamilyKind.POISSON:
        return stats.poisson(theta)
    v = 1.0 if family.kind == FamilyKind.GEOMETRIC else family.v
    return stats.nbinom(v, 1.0 - theta)


def cdf(family: PsdFamily, theta: ArrayLike, K: ArrayLike):
    theta = _check_theta(family, theta)
    K = np.asarray(K, dtype=float)
    if family.kind == FamilyKind.GEOMETRIC:
        value = np.where(K < 0, 0.0, -np.expm1((np.floor(K) + 1.0) * np.log(np.where(theta > 0, theta, 1.0))))
        value = np.where((theta == 0) & (K >= 0), 1.0, value)
    else:
        value = np.where(theta == 0, (K >= 0).astype(float), _frozen(family, theta).cdf(K))
    return _out(value)


def sf(family: PsdFamily, theta: ArrayLike, K: ArrayLike):
    """P(X > K), computed without cancellation."""
    theta = _check_theta(family, theta)
    K = np.asarray(K, dtype=float)
    if family.kind == FamilyKind.GEOMETRIC:
        value = np.where(K < 0, 1.0, np.power(theta, np.floor(K) + 1.0))
    else:
        value = np.where(theta == 0, (K < 0).astype(float), _frozen(family, theta).sf(K))
    return _out(value)


def quantile(family: PsdFamily, theta: ArrayLike, u: ArrayLike):
    """Generalized inverse min{k : F_theta(k) >= u}."""
    theta = _check_theta(family, theta)
    u = np.asarray(u, dtype=float)
    if np.any(~(u >= 0)) or np.any(u >= 1):
        raise DomainError("u must lie in [0, 1)")
    value = _frozen(family, theta).ppf(u)
    value = np.where((theta == 0) | (u == 0), 0.0, value)
    return _out(np.maximum(value, 0.0).astype(np.int64))


def dual_parameters(family: PsdFamily, k) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(a, b, log c_k) arrays such that f_theta(k) = c_k g_k(theta)."""
    k = np.asarray(_check_k(k), dtype=float)
    a = k + 1.0
    if family.kind == FamilyKind.POISSON:
        return a, np.ones_like(k), np.zeros_like(k)
    b = np.full_like(k, family.shape + 1.0)
    log_c = log_coefficient(family, k) + special.betaln(a, b)
    return a, b, log_c


def dual_density(family: PsdFamily, k: int) -> Tuple[DualDensity, float]:
    a, b, log_c = dual_parameters(family, k)
    kind = DualKind.GAMMA if family.kind == FamilyKind.POISSON else DualKind.BETA
    return DualDensity(kind=kind, a=float(a), b=float(b)), float(np.exp(log_c))


def dual_logpdf(kind: DualKind, a, b, theta) -> np.ndarray:
    if kind == DualKind.GAMMA:
        return stats.gamma.logpdf(theta, a)
    return stats.beta.logpdf(theta, a, b)


def theory_constants(family: PsdFamily, support_bound: float, delta0: float, eta0: float, d: int) -> TheoryConstants:
    if d < 1:
        raise DomainError("dimension must be at least 1")
    if not 0 < eta0 < 1:
        raise DomainError("eta0 must lie in (0, 1)")
    if math.isinf(family.R):
        if not support_bound > 0:
            raise DomainError("support bound M must be positive")
        t0 = 0.5
        theta_tilde = float(support_bound)
        sup_ratio = 1.0
    else:
        q0 = support_bound / family.R
        if not 0 < q0 < 1:
            raise DomainError("support bound must lie in (0, R)")
        t0 = (q0 + 1.0) / 2.0
        theta_tilde = q0 * family.R
        # b'/b is increasing on (0, R): its supremum is the value at theta_tilde.
        sup_ratio = family.shape / (1.0 - theta_tilde)
    if not 0 < delta0 < support_bound:
        raise DomainError("delta0 must lie in (0, support bound)")

    U = int(math.floor(theta_tilde * sup_ratio)) + 1
    W = _scan_W(family, t0, theta_tilde)
    V = _scan_V(family)
    A = float(pmf(family, theta_tilde, W)) / ((1.0 - t0) * t0 ** (W - 1))

    log_b_delta = float(log_normalizer(family, delta0))  # b_0 = 1 for the three families
    largest = max(U, V, W, math.exp(log_b_delta - math.log(eta0) / d), delta0 ** (-1.0 / d))
    log_first = math.log(1.0 / math.sqrt(t0)) * largest - math.log(d)
    log_second = -(W - 1) * math.log(t0) - math.log(1.0 - t0)
    log_N = max(log_first, log_second)
    N = int(math.floor(math.exp(log_N))) + 1 if log_N < 700 else None

    return TheoryConstants(
        support_bound=support_bound, delta0=delta0, eta0=eta0, d=d,
        t0=t0, theta_tilde=theta_tilde, U=U, W=W, V=V, A=A, N=N, log_N=log_N,
    )


def _scan_W(family: PsdFamily, t0: float, theta_tilde: float) -> int:
    cap = settings.W_SCAN_CAP
    k = np.arange(3, cap + 2, dtype=float)
    log_ratio = log_coefficient(family, k + 1) - log_coefficient(family, k)
    limit = -math.inf if math.isinf(family.R) else -math.log(family.R)
    # sup over k >= w of the ratio, including its limit at infinity
    suffix = np.maximum.accumulate(log_ratio[::-1])[::-1]
    suffix = np.maximum(suffix, limit)
    bound = math.log(t0 / theta_tilde) + 1e-12
    hits = np.flatnonzero(suffix <= bound)
    if hits.size == 0:
        raise ResourceLimitError(f"no W <= {cap} satisfies the coefficient ratio bound")
    return int(k[hits[0]])


def _scan_V(family: PsdFamily) -> int:
    k = np.arange(1, settings.V_SCAN_CAP + 1, dtype=float)
    failing = np.flatnonzero(log_coefficient(family, k) < -k * np.log(k))
    return 1 if failing.size == 0 else int(k[failing[-1]]) + 1


def lemma_monotone_check(family: PsdFamily, constants: TheoryConstants, k_max: int = 1000, grid_points: int = 100) -> bool:
    """theta -> f_theta(k) nondecreasing on [0, theta_tilde] for U <= k <= k_max."""
    if k_max < constants.U:
        return True
    theta = np.linspace(0.0, constants.theta_tilde, grid_points)[:, None]
    k = np.arange(constants.U, k_max + 1)[None, :]
    values = np.exp(log_pmf(family, theta, k))
    steps = np.diff(values, axis=0)
    return bool(np.all(steps >= -1e-12 * values[1:]))


def ratio_bound_check(family: PsdFamily, constants: TheoryConstants, k_max: int = 1000) -> bool:
    """b_{k+1} <= t0 b_k / theta_tilde for W <= k <= k_max."""
    k = np.arange(constants.W, k_max + 1, dtype=float)
    log_ratio = log_coefficient(family, k + 1) - log_coefficient(family, k)
    return bool(np.all(log_ratio <= math.log(constants.t0 / constants.theta_tilde) + 1e-12))
