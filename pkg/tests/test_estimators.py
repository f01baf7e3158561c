import math

import numpy as np
import pytest

from app.config import settings
from app.domain.errors import DomainError, ResourceLimitError
from app.domain.estimators.distances import covering_box, distance, slabs, tail_mass
from app.domain.estimators.pmfs import empirical, hybrid, hybrid_eval, k_tilde
from app.domain.estimators.schemas import Metric
from app.domain.mixtures.model import box_tail, log_nd, mixture_pmf, sample
from app.domain.mixtures.schemas import Dataset
from app.domain.npmle.schemas import FitOptions
from app.domain.npmle.solver import fit


class TestEmpirical:
    def test_masses(self, small_dataset):
        pmf = empirical(small_dataset)
        assert pmf.mass((0, 1)) == pytest.approx(0.4)
        assert pmf.mass((5, 5)) == 0.0
        assert pmf.max_observation == 3
        assert pmf.box_mass(1) == pytest.approx(0.6)


class TestHybrid:
    @pytest.fixture
    def fitted_and_data(self, two_atom_geometric):
        data = sample(two_atom_geometric, 400, np.random.default_rng(8))
        return two_atom_geometric, data

    def test_k_tilde_threshold(self, fitted_and_data):
        model, data = fitted_and_data
        K = k_tilde(model, data.n, data.d)
        assert box_tail(model, K) <= log_nd(data.n, data.d) ** -4

    def test_normalizer(self, fitted_and_data):
        model, data = fitted_and_data
        observed = empirical(data)
        h = hybrid(observed, model, data.n, data.d)
        assert h.s_tilde == pytest.approx(observed.box_mass(h.k_tilde) + box_tail(model, h.k_tilde))

    def test_total_mass_is_one(self, fitted_and_data):
        model, data = fitted_and_data
        h = hybrid(empirical(data), model, data.n, data.d)
        K = covering_box(h, 1e-14)
        total = math.fsum(float(np.sum(values)) for _, values in slabs(h, K)) + tail_mass(h, K)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_pointwise_values(self, fitted_and_data):
        model, data = fitted_and_data
        observed = empirical(data)
        h = hybrid(observed, model, data.n, data.d)
        inside = tuple(observed.rows[0])
        outside = (h.k_tilde + 1, 0)
        assert hybrid_eval(h, inside) == pytest.approx(observed.mass(inside) / h.s_tilde)
        assert hybrid_eval(h, outside) == pytest.approx(mixture_pmf(model, outside) / h.s_tilde)
        assert hybrid_eval(h, (-1, 0)) == 0.0

    @pytest.mark.slow
    def test_empirical_part_is_positive_on_the_low_box(self, two_atom_geometric):
        positive = 0
        for seed in range(100):
            data = sample(two_atom_geometric, 10_000, np.random.default_rng(500 + seed))
            fitted = fit(data, two_atom_geometric.family, FitOptions(grid_size=10, max_outer_iters=25, seed=seed)).model
            observed = empirical(data)
            h = hybrid(observed, fitted, data.n, data.d)
            cells = np.ndindex(*([h.k_tilde + 1] * data.d))
            positive += all(observed.mass(cell) > 0 for cell in cells)
        assert positive >= 95

    def test_dimension_mismatch(self, fitted_and_data, small_dataset):
        model, data = fitted_and_data
        with pytest.raises(DomainError):
            hybrid(empirical(Dataset(np.array([[1], [2], [3]]))), model, 3, 1)


class TestDistances:
    def test_poisson_hellinger_closed_form(self, poisson, make_point_mass):
        result = distance(make_point_mass(poisson, [1.0]), make_point_mass(poisson, [2.0]), Metric.HELLINGER)
        expected = math.sqrt(1.0 - math.exp(-((1.0 - math.sqrt(2.0)) ** 2) / 2.0))
        assert result.value == pytest.approx(expected, abs=1e-10)
        assert result.truncation_bound < 1e-5

    def test_hellinger_affinity_multiplies_across_coordinates(self, poisson, make_point_mass):
        result = distance(make_point_mass(poisson, [1.0, 1.0]), make_point_mass(poisson, [2.0, 2.0]), "hellinger")
        expected = math.sqrt(1.0 - math.exp(-((1.0 - math.sqrt(2.0)) ** 2)))
        assert result.value == pytest.approx(expected, abs=1e-9)

    def test_point_mass_against_geometric(self, geometric, make_point_mass):
        p, q = make_point_mass(geometric, [0.0]), make_point_mass(geometric, [0.5])
        assert distance(p, q, Metric.LINF).value == pytest.approx(0.5)
        assert distance(p, q, Metric.L1).value == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("metric", list(Metric))
    def test_identity_and_symmetry(self, metric, two_atom_poisson, small_dataset):
        observed = empirical(small_dataset)
        assert distance(observed, observed, metric).value == 0.0
        assert distance(two_atom_poisson, two_atom_poisson, metric).value == pytest.approx(0.0, abs=1e-15)
        forward = distance(two_atom_poisson, observed, metric).value
        backward = distance(observed, two_atom_poisson, metric).value
        assert forward == pytest.approx(backward, rel=1e-12)

    def test_metric_ordering(self, two_atom_poisson, small_dataset):
        observed = empirical(small_dataset)
        l1 = distance(two_atom_poisson, observed, Metric.L1).value
        l2 = distance(two_atom_poisson, observed, Metric.L2).value
        linf = distance(two_atom_poisson, observed, Metric.LINF).value
        assert linf <= l2 <= l1 <= 2.0

    def test_box_covers_both_pmfs(self, two_atom_geometric, small_dataset):
        result = distance(two_atom_geometric, empirical(small_dataset), Metric.L1, eps_tail=1e-6)
        assert result.box >= 3
        assert box_tail(two_atom_geometric, result.box) <= 1e-6

    def test_dimension_mismatch(self, poisson, make_point_mass):
        with pytest.raises(DomainError):
            distance(make_point_mass(poisson, [1.0]), make_point_mass(poisson, [1.0, 1.0]), Metric.L1)

    def test_rejects_nonpositive_eps(self, poisson, make_point_mass):
        with pytest.raises(DomainError):
            distance(make_point_mass(poisson, [1.0]), make_point_mass(poisson, [2.0]), Metric.L1, eps_tail=0.0)

    def test_box_cap(self, poisson, make_point_mass, monkeypatch):
        monkeypatch.setattr(settings, "MAX_BOX_POINTS", 10)
        with pytest.raises(ResourceLimitError):
            distance(make_point_mass(poisson, [5.0, 5.0]), make_point_mass(poisson, [6.0, 6.0]), Metric.L2)

    def test_hybrid_distance_is_finite(self, two_atom_geometric):
        data = sample(two_atom_geometric, 300, np.random.default_rng(9))
        h = hybrid(empirical(data), two_atom_geometric, data.n, data.d)
        value = distance(h, two_atom_geometric, Metric.HELLINGER).value
        assert 0.0 <= value < 1.0
