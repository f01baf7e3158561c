import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from app.domain.estimators.schemas import Metric
from app.domain.experiments.runners import (
    cv_spec,
    cv_table,
    dataset_digest,
    estimates,
    run_cv_experiment,
    run_power_experiment,
    run_rate_experiment,
)
from app.domain.experiments.schemas import ESTIMATORS, PowerRunSpec, RateRunSpec
from app.domain.families.schemas import PsdFamily
from app.domain.mixtures.model import sample
from app.domain.mixtures.schemas import Dataset
from app.domain.npmle.schemas import FitOptions
from app.domain.synthetic.schemas import DependentKind, ScenarioLabel

QUICK_FIT = FitOptions(grid_size=10, max_outer_iters=25)


class TestRunSpecs:
    def test_default_grid_follows_dimension(self, geometric):
        assert RateRunSpec(label=ScenarioLabel.A, family=geometric).n_grid == [100, 1_000, 10_000]
        assert RateRunSpec(label=ScenarioLabel.A, family=geometric, d=4).n_grid == [100, 1_000]

    def test_grid_must_increase(self, geometric):
        with pytest.raises(ValidationError):
            RateRunSpec(label=ScenarioLabel.A, family=geometric, n_grid=[100, 50])

    def test_power_levels_are_checked(self):
        with pytest.raises(ValidationError):
            PowerRunSpec(kind=DependentKind.POISSON, levels=[1.0])
        with pytest.raises(ValidationError):
            PowerRunSpec(kind=DependentKind.GEOMETRIC, levels=[0.5])
        assert PowerRunSpec(kind=DependentKind.GEOMETRIC).levels == [1.0, 1.25, 1.5, 1.75, 2.0]

    def test_spec_hash_is_stable(self, geometric):
        first = RateRunSpec(label=ScenarioLabel.B, family=geometric, seed=3)
        second = RateRunSpec(label=ScenarioLabel.B, family=geometric, seed=3)
        third = RateRunSpec(label=ScenarioLabel.B, family=geometric, seed=4)
        assert first.spec_hash() == second.spec_hash() != third.spec_hash()

    def test_cv_spec_records_the_data(self, small_dataset, poisson):
        spec = cv_spec(small_dataset, poisson, repeats=3, seed=1)
        assert (spec.n, spec.d, spec.repeats) == (5, 2, 3)
        assert spec.data_digest == dataset_digest(small_dataset)

    def test_cv_needs_four_rows(self, poisson):
        with pytest.raises(ValidationError):
            cv_spec(Dataset(np.array([[1], [2], [3]])), poisson)


class TestEstimates:
    def test_three_estimators(self, two_atom_geometric):
        data = sample(two_atom_geometric, 100, np.random.default_rng(0))
        pmfs, converged = estimates(data, two_atom_geometric.family, QUICK_FIT)
        assert list(pmfs) == list(ESTIMATORS)
        assert isinstance(converged, bool)


class TestRateExperiment:
    @pytest.fixture
    def spec(self, geometric):
        return RateRunSpec(label=ScenarioLabel.A, family=geometric, n_grid=[40, 80], replications=2,
                           seed=9, fit_options=QUICK_FIT)

    def test_table_layout(self, spec):
        table = run_rate_experiment(spec, workers=1)
        assert len(table) == 3 * 3 * 2
        assert {"estimator", "metric", "n", "value", "stderr", "replications", "failed", "nonconverged",
                "rate_envelope", "seed", "spec_hash"} <= set(table.columns)
        assert (table["replications"] + table["failed"] == 2).all()
        assert (table["spec_hash"] == spec.spec_hash()).all()

    def test_worker_count_does_not_change_results(self, spec):
        serial = run_rate_experiment(spec, workers=1)
        parallel = run_rate_experiment(spec, workers=2)
        pd.testing.assert_frame_equal(serial, parallel)


class TestPowerExperiment:
    def test_table_layout(self):
        spec = PowerRunSpec(kind=DependentKind.POISSON, levels=[0.0, 0.6], replications=2, B=3, n=40,
                            metrics=[Metric.HELLINGER], seed=2, fit_options=QUICK_FIT)
        table = run_power_experiment(spec, workers=1)
        assert table["dependence"].tolist() == [0.0, 0.6]
        assert table["value"].between(0, 1).all()
        assert (table["replications"] == 2).all()


class TestCvExperiment:
    def test_table_and_layout(self, two_atom_poisson):
        data = sample(two_atom_poisson, 60, np.random.default_rng(12))
        table = run_cv_experiment(data, two_atom_poisson.family, repeats=2, seed=4, fit_options=QUICK_FIT, workers=1)
        assert len(table) == 9
        wide = cv_table(table)
        assert list(wide.index) == ["Empirical", "Hybrid", "MLE"]
        assert list(wide.columns) == ["Hellinger", "l2", "l1"]

    def test_cv_table_from_long_frame(self):
        long = pd.DataFrame({
            "estimator": [e for e in ESTIMATORS for _ in range(3)],
            "metric": ["hellinger", "l2", "l1"] * 3,
            "value": np.arange(9, dtype=float),
        })
        wide = cv_table(long)
        assert wide.loc["Hybrid", "l2"] == 4.0
        assert wide.loc["MLE", "Hellinger"] == 6.0


@pytest.mark.slow
class TestDeskScaleProperties:
    def test_empirical_rate_is_root_n(self):
        for family in (PsdFamily.poisson(), PsdFamily.geometric(), PsdFamily.negbin(2.0)):
            spec = RateRunSpec(label=ScenarioLabel.A, family=family, n_grid=[100, 10_000], replications=20,
                               metrics=[Metric.L1], seed=1)
            table = run_rate_experiment(spec, workers=0)
            empirical = table[table["estimator"] == "Empirical"].set_index("n")["value"]
            ratio = empirical[10_000] / empirical[100]
            assert 0.5 < ratio < 2.0

    def test_mle_beats_empirical(self):
        for label in (ScenarioLabel.A, ScenarioLabel.C):
            spec = RateRunSpec(label=label, family=PsdFamily.poisson(), n_grid=[10_000], replications=20, seed=2)
            table = run_rate_experiment(spec, workers=0).set_index(["estimator", "metric"])["value"]
            for metric in ("hellinger", "l1", "l2"):
                assert table[("MLE", metric)] <= table[("Empirical", metric)]

    def test_cross_validation_ordering(self, two_atom_poisson):
        data = sample(two_atom_poisson, 2000, np.random.default_rng(99))
        table = run_cv_experiment(data, two_atom_poisson.family, repeats=100, seed=1, workers=0)
        wide = cv_table(table)
        assert wide.loc["MLE", "Hellinger"] <= wide.loc["Empirical", "Hellinger"]

    def test_geometric_test_holds_its_size(self):
        spec = PowerRunSpec(kind=DependentKind.GEOMETRIC, levels=[1.0], replications=100, B=49, n=1000, seed=11)
        table = run_power_experiment(spec, workers=None)
        assert (table["value"] <= 0.10).all()

    def test_geometric_test_detects_strong_dependence(self):
        spec = PowerRunSpec(kind=DependentKind.GEOMETRIC, levels=[2.0], replications=100, B=49, n=1000, seed=12)
        table = run_power_experiment(spec, workers=None)
        assert (table["value"] >= 0.90).all()

    def test_poisson_test_holds_its_size(self):
        spec = PowerRunSpec(kind=DependentKind.POISSON, levels=[0.0], replications=100, B=49, n=1000, seed=13)
        table = run_power_experiment(spec, workers=None)
        assert table["value"].between(0.0, 0.12).all()
