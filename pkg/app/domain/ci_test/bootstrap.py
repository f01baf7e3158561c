"""
Parametric bootstrap test of conditional independence.

D_n is the distance between the fitted mixture and the empirical pmf. Under
the null the fitted mixture is resampled B times, refitted and D recomputed;
the test rejects when D_n exceeds the empirical (1 - alpha)-quantile.
"""
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.domain.ci_test.schemas import FiveNumberSummary, TestOptions, TestResult
from app.domain.estimators.distances import distance
from app.domain.estimators.pmfs import empirical
from app.domain.estimators.schemas import Metric
from app.domain.families.schemas import PsdFamily
from app.domain.mixtures.model import sample
from app.domain.mixtures.schemas import Dataset, MixturePmf
from app.domain.npmle.solver import fit
from app.infrastructure.parallel import fan_out
from app.infrastructure.random import task_seeds

logger = logging.getLogger(__name__)


def statistics(fitted: MixturePmf, dataset: Dataset, metrics: Sequence[Metric], eps_tail=None) -> Dict[str, float]:
    """D_n per metric, all from the same fitted model."""
    observed = empirical(dataset)
    return {m.value: distance(fitted, observed, m, eps_tail).value for m in metrics}


def _replicate(task) -> Tuple[int, Dict[str, float], bool]:
    b, model, n, seed, fit_options, metrics, eps_tail = task
    rng, fit_seed = task_seeds(seed, b)
    data = sample(model, n, rng)
    refit = fit(data, model.family, fit_options.model_copy(update={"seed": fit_seed}))
    return b, statistics(refit.model, data, metrics, eps_tail), refit.converged


def order_statistic_quantile(values: Sequence[float], alpha: float) -> float:
    """The ceil((1 - alpha) B)-th smallest value."""
    ordered = np.sort(np.asarray(values, dtype=float))
    rank = math.ceil(round((1.0 - alpha) * ordered.size, 9))
    return float(ordered[max(rank, 1) - 1])


def decide(observed: float, boot: Sequence[float], alpha: float) -> Tuple[float, float, bool]:
    """(quantile, p-value, reject) for one metric."""
    boot = np.asarray(boot, dtype=float)
    quantile = order_statistic_quantile(boot, alpha)
    p_value = (1.0 + np.count_nonzero(boot >= observed)) / (boot.size + 1.0)
    return quantile, float(p_value), bool(observed > quantile)


def five_number_summary(values: Sequence[float]) -> FiveNumberSummary:
    q = np.quantile(np.asarray(values, dtype=float), [0.0, 0.25, 0.5, 0.75, 1.0])
    return FiveNumberSummary(min=q[0], q1=q[1], median=q[2], q3=q[3], max=q[4])


def ci_test(dataset: Dataset, family: PsdFamily, options: Optional[TestOptions] = None) -> TestResult:
    options = options or TestOptions()
    if options.B < math.ceil(1.0 / options.alpha) - 1:
        logger.warning("B = %d is too small for a meaningful %.3g-level quantile", options.B, options.alpha)

    _, fit_seed = task_seeds(options.seed, 0)
    fitted = fit(dataset, family, options.fit_options.model_copy(update={"seed": fit_seed}))
    observed = statistics(fitted.model, dataset, options.metrics, options.eps_tail)

    tasks = [
        (b, fitted.model, dataset.n, options.seed, options.fit_options, options.metrics, options.eps_tail)
        for b in range(1, options.B + 1)
    ]
    outcomes = sorted(fan_out(_replicate, tasks, options.workers), key=lambda outcome: outcome[0])
    nonconverged: List[int] = [b for b, _, converged in outcomes if not converged]
    if nonconverged:
        logger.warning("%d of %d bootstrap refits did not converge", len(nonconverged), options.B)

    boot, quantile, p_value, reject, summary = {}, {}, {}, {}, {}
    for metric in options.metrics:
        key = metric.value
        boot[key] = [stats[key] for _, stats, _ in outcomes]
        quantile[key], p_value[key], reject[key] = decide(observed[key], boot[key], options.alpha)
        summary[key] = five_number_summary(boot[key])

    return TestResult(
        observed=observed,
        boot=boot,
        quantile=quantile,
        p_value=p_value,
        reject=reject,
        summary=summary,
        B=options.B,
        alpha=options.alpha,
        seed=options.seed,
        fit_converged=fitted.converged,
        n_nonconverged=len(nonconverged),
        nonconverged=nonconverged,
    )
