import numpy as np

from app.domain.errors import DomainError
from app.domain.estimators.schemas import EmpiricalPmf, HybridPmf
from app.domain.mixtures.model import box_tail, log_nd, mixture_pmf, smallest_box
from app.domain.mixtures.schemas import Dataset, MixturePmf


def empirical(dataset: Dataset) -> EmpiricalPmf:
    return EmpiricalPmf.from_dataset(dataset)


def k_tilde(fitted: MixturePmf, n: int, d: int) -> int:
    """Smallest K whose box leaves at most 1/log(nd)^(2+d) of the fitted mass outside."""
    return smallest_box(fitted, log_nd(n, d) ** -(2 + d))


def hybrid(empirical_pmf: EmpiricalPmf, fitted: MixturePmf, n: int, d: int) -> HybridPmf:
    if empirical_pmf.d != d or fitted.d != d:
        raise DomainError("empirical and fitted pmfs disagree on the dimension")
    K = k_tilde(fitted, n, d)
    s = empirical_pmf.box_mass(K) + box_tail(fitted, K)
    assert s > 0, "hybrid normalizer vanished"
    return HybridPmf(empirical=empirical_pmf, fitted=fitted, k_tilde=K, s_tilde=s)


def hybrid_eval(h: HybridPmf, k) -> float:
    k = np.asarray(k)
    if np.any(k < 0):
        return 0.0
    if int(k.max()) <= h.k_tilde:
        return h.empirical.mass(k) / h.s_tilde
    return mixture_pmf(h.fitted, k) / h.s_tilde
