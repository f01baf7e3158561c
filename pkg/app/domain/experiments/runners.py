"""
Desk-scale simulation studies: scaled estimation error against sample size,
power of the conditional independence test, and 2-fold cross-validation.

Every replication draws from its own (seed, key) substream, so tables do not
depend on the worker count or on execution order. Tables are long-format
pandas frames; each row carries the seed and the spec hash for replay.
"""
import hashlib
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from app.domain.ci_test.bootstrap import ci_test
from app.domain.ci_test.schemas import TestOptions
from app.domain.errors import PsdMixError
from app.domain.estimators.distances import PmfHandle, distance
from app.domain.estimators.pmfs import empirical, hybrid
from app.domain.experiments.schemas import CV_METRICS, ESTIMATORS, CvRunSpec, PowerRunSpec, RateRunSpec
from app.domain.families.schemas import PsdFamily
from app.domain.mixtures.model import rate_envelope, sample
from app.domain.mixtures.schemas import Dataset, MixturePmf
from app.domain.npmle.schemas import FitOptions
from app.domain.npmle.solver import fit
from app.domain.synthetic.generators import (
    sample_dependent_geometric_mixture,
    sample_dependent_poisson_mixture,
    scenario_mixing,
)
from app.domain.synthetic.schemas import DependentKind, ScenarioConfig
from app.infrastructure.parallel import fan_out
from app.infrastructure.random import task_seeds

logger = logging.getLogger(__name__)

CV_METRIC_LABELS = {"hellinger": "Hellinger", "l2": "l2", "l1": "l1"}


def estimates(data: Dataset, family: PsdFamily, fit_options: FitOptions) -> Tuple[Dict[str, PmfHandle], bool]:
    """Empirical, hybrid and MLE pmfs from one sample, plus the fit's convergence flag."""
    result = fit(data, family, fit_options)
    observed = empirical(data)
    pmfs = {
        "Empirical": observed,
        "Hybrid": hybrid(observed, result.model, data.n, data.d),
        "MLE": result.model,
    }
    return pmfs, result.converged


def _distances(pmfs: Dict[str, PmfHandle], reference: PmfHandle, metrics, eps_tail, scale: float = 1.0):
    values = {}
    for estimator, pmf in pmfs.items():
        for metric in metrics:
            try:
                values[(estimator, metric.value)] = scale * distance(pmf, reference, metric, eps_tail).value
            except PsdMixError as error:
                logger.warning("%s %s distance skipped: %s", estimator, metric.value, error)
                values[(estimator, metric.value)] = math.nan
    return values


def _rate_replicate(task):
    spec, n, key = task
    truth = MixturePmf(family=spec.family, mixing=scenario_mixing(ScenarioConfig(label=spec.label, family=spec.family, d=spec.d)))
    rng, fit_seed = task_seeds(spec.seed, *key)
    data = sample(truth, n, rng)
    try:
        pmfs, converged = estimates(data, spec.family, spec.fit_options.model_copy(update={"seed": fit_seed}))
    except PsdMixError as error:
        logger.warning("replication %s failed: %s", key, error)
        return n, {}, False
    return n, _distances(pmfs, truth, spec.metrics, spec.eps_tail, math.sqrt(n)), converged


def _aggregate(records: List[dict], keys: List[str]) -> pd.DataFrame:
    frame = pd.DataFrame.from_records(records)
    grouped = frame.groupby(keys, sort=False)["value"]
    table = grouped.agg(value="mean", stderr="sem", replications="count").reset_index()
    table["failed"] = grouped.apply(lambda v: int(v.isna().sum())).to_numpy()
    return table


def run_rate_experiment(spec: RateRunSpec, workers: Optional[int] = None) -> pd.DataFrame:
    """sqrt(n)-scaled distances of each estimator to the truth, one row per (estimator, metric, n)."""
    tasks = [(spec, n, (i, r)) for i, n in enumerate(spec.n_grid) for r in range(spec.replications)]
    outcomes = fan_out(_rate_replicate, tasks, workers)

    records = []
    nonconverged: Dict[int, int] = {}
    for n, values, converged in outcomes:
        nonconverged[n] = nonconverged.get(n, 0) + (not converged)
        for estimator in ESTIMATORS:
            for metric in spec.metrics:
                records.append({"estimator": estimator, "metric": metric.value, "n": n,
                                "value": values.get((estimator, metric.value), math.nan)})

    table = _aggregate(records, ["estimator", "metric", "n"])
    table["nonconverged"] = table["n"].map(nonconverged)
    table["rate_envelope"] = [rate_envelope(n, spec.d) for n in table["n"]]
    table["seed"] = spec.seed
    table["spec_hash"] = spec.spec_hash()
    return table


def _dependent_sample(kind: DependentKind, level: float, n: int, rng: np.random.Generator) -> Dataset:
    if kind == DependentKind.POISSON:
        return sample_dependent_poisson_mixture(level, n, rng)
    return sample_dependent_geometric_mixture(level, n, rng)


def _power_replicate(task):
    spec, level, key = task
    family = PsdFamily.poisson() if spec.kind == DependentKind.POISSON else PsdFamily.geometric()
    rng, test_seed = task_seeds(spec.seed, *key)
    data = _dependent_sample(spec.kind, level, spec.n, rng)
    options = TestOptions(B=spec.B, alpha=spec.alpha, metrics=spec.metrics, seed=test_seed,
                          fit_options=spec.fit_options, workers=1)
    result = ci_test(data, family, options)
    return level, result.reject, result.n_nonconverged


def run_power_experiment(spec: PowerRunSpec, workers: Optional[int] = None) -> pd.DataFrame:
    """Rejection frequency per metric at each dependence level."""
    tasks = [(spec, level, (i, m)) for i, level in enumerate(spec.levels) for m in range(spec.replications)]
    outcomes = fan_out(_power_replicate, tasks, workers)

    rows = []
    for level in spec.levels:
        here = [(reject, flagged) for lv, reject, flagged in outcomes if lv == level]
        for metric in spec.metrics:
            rate = float(np.mean([reject[metric.value] for reject, _ in here]))
            rows.append({
                "kind": spec.kind.value,
                "dependence": level,
                "metric": metric.value,
                "value": rate,
                "stderr": math.sqrt(rate * (1.0 - rate) / len(here)),
                "replications": len(here),
                "nonconverged_refits": int(sum(flagged for _, flagged in here)),
            })
    table = pd.DataFrame.from_records(rows)
    table["seed"] = spec.seed
    table["spec_hash"] = spec.spec_hash()
    return table


def dataset_digest(dataset: Dataset) -> str:
    values = np.ascontiguousarray(dataset.values, dtype=np.int64)
    return hashlib.sha256(str(values.shape).encode() + values.tobytes()).hexdigest()


def _cv_repeat(task):
    spec, dataset, r = task
    rng, fit_seed = task_seeds(spec.seed, r)
    order = rng.permutation(dataset.n)
    half = dataset.n // 2
    train, held_out = dataset.subset(order[:half]), dataset.subset(order[half:2 * half])
    pmfs, converged = estimates(train, spec.family, spec.fit_options.model_copy(update={"seed": fit_seed}))
    return _distances(pmfs, empirical(held_out), CV_METRICS, spec.eps_tail), converged


def cv_spec(dataset: Dataset, family: PsdFamily, repeats: Optional[int] = None, seed: int = 0,
            fit_options: Optional[FitOptions] = None, eps_tail: Optional[float] = None) -> CvRunSpec:
    fields = {"family": family, "seed": seed, "n": dataset.n, "d": dataset.d,
              "data_digest": dataset_digest(dataset), "eps_tail": eps_tail,
              "fit_options": fit_options or FitOptions()}
    if repeats is not None:
        fields["repeats"] = repeats
    return CvRunSpec(**fields)


def run_cv_experiment(dataset: Dataset, family: PsdFamily, repeats: Optional[int] = None, seed: int = 0,
                      fit_options: Optional[FitOptions] = None, eps_tail: Optional[float] = None,
                      workers: Optional[int] = None) -> pd.DataFrame:
    """2-fold cross-validation: fit on one random half, evaluate against the empirical pmf of the other."""
    spec = cv_spec(dataset, family, repeats, seed, fit_options, eps_tail)

    outcomes = fan_out(_cv_repeat, [(spec, dataset, r) for r in range(spec.repeats)], workers)
    records = [
        {"estimator": estimator, "metric": metric.value, "value": values[(estimator, metric.value)]}
        for values, _ in outcomes
        for estimator in ESTIMATORS
        for metric in CV_METRICS
    ]
    table = _aggregate(records, ["estimator", "metric"])
    table["nonconverged"] = sum(not converged for _, converged in outcomes)
    table["seed"] = spec.seed
    table["spec_hash"] = spec.spec_hash()
    return table


def cv_table(table: pd.DataFrame) -> pd.DataFrame:
    """Means laid out with estimators as rows and Hellinger, l2, l1 as columns."""
    wide = table.pivot(index="estimator", columns="metric", values="value")
    wide = wide.reindex(index=list(ESTIMATORS), columns=[m.value for m in CV_METRICS])
    return wide.rename(columns=CV_METRIC_LABELS)
