import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.config import settings
from app.domain.errors import DomainError, ResourceLimitError
from app.domain.families.kernels import pmf, theory_constants
from app.domain.mixtures.model import (
    box_mass,
    box_tail,
    log_likelihood,
    log_nd,
    mixture_pmf,
    rate_envelope,
    sample,
    smallest_box,
    tail_bound_check,
    tail_index_Kn,
    tau_n,
    zero_cell_bound,
    zero_probability_row,
)
from app.domain.mixtures.schemas import Dataset, MixingDistribution, MixturePmf


class TestSchemas:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            MixingDistribution(dim=1, support=[[0.1], [0.2]], weights=[0.5, 0.6])

    def test_support_dimension_is_checked(self):
        with pytest.raises(ValidationError):
            MixingDistribution(dim=2, support=[[0.1]], weights=[1.0])

    def test_support_must_lie_below_radius(self, geometric):
        mixing = MixingDistribution(dim=1, support=[[1.0]], weights=[1.0])
        with pytest.raises(ValidationError):
            MixturePmf(family=geometric, mixing=mixing)

    def test_dataset_rejects_negative_counts(self):
        with pytest.raises(DomainError):
            Dataset(np.array([[1, -1]]))

    def test_dataset_unique_counts_multiplicities(self, small_dataset):
        rows, counts = small_dataset.unique()
        assert rows.tolist() == [[0, 1], [1, 1], [2, 0], [3, 2]]
        assert counts.tolist() == [2.0, 1.0, 1.0, 1.0]


class TestEvaluation:
    def test_single_atom_is_product(self, poisson, make_point_mass):
        model = make_point_mass(poisson, [1.5, 0.5])
        expected = pmf(poisson, 1.5, 2) * pmf(poisson, 0.5, 1)
        assert mixture_pmf(model, [2, 1]) == pytest.approx(expected, rel=1e-13)

    def test_scalar_point_gives_float(self, poisson, make_point_mass):
        value = mixture_pmf(make_point_mass(poisson, [1.0]), 2)
        assert isinstance(value, float)
        assert value == pytest.approx(math.exp(-1.0) / 2)

    def test_duplicate_atoms_equal_single_atom(self, geometric, make_point_mass):
        split = MixturePmf(family=geometric,
                           mixing=MixingDistribution(dim=2, support=[[0.4, 0.6], [0.4, 0.6]], weights=[0.3, 0.7]))
        single = make_point_mass(geometric, [0.4, 0.6])
        points = np.array([[0, 0], [3, 1], [5, 7]])
        np.testing.assert_allclose(mixture_pmf(split, points), mixture_pmf(single, points), rtol=1e-13)

    def test_box_mass_and_tail_are_complementary(self, two_atom_poisson):
        for K in range(6):
            assert box_mass(two_atom_poisson, K) + box_tail(two_atom_poisson, K) == pytest.approx(1.0, abs=1e-14)
        assert box_tail(two_atom_poisson, -1) == 1.0

    def test_smallest_box(self, geometric, make_point_mass):
        model = make_point_mass(geometric, [0.5])
        assert smallest_box(model, 0.01) == 6

    def test_log_likelihood_of_point_mass(self, geometric, make_point_mass):
        model = make_point_mass(geometric, [0.5])
        data = Dataset(np.array([[0], [1], [1]]))
        assert log_likelihood(model, data) == pytest.approx(math.log(0.5) + 2 * math.log(0.25), rel=1e-14)

    def test_zero_probability_row(self, poisson, make_point_mass, caplog):
        model = make_point_mass(poisson, [0.0, 1.0])
        data = Dataset(np.array([[0, 2], [1, 0]]))
        assert log_likelihood(model, data) == -math.inf
        assert zero_probability_row(model, data) == 1
        assert "zero probability" in caplog.text

    def test_dimension_mismatch(self, two_atom_poisson):
        with pytest.raises(DomainError):
            log_likelihood(two_atom_poisson, Dataset(np.array([[1, 2, 3]])))


class TestSampling:
    def test_shape_and_determinism(self, two_atom_geometric):
        first = sample(two_atom_geometric, 50, np.random.default_rng(3))
        second = sample(two_atom_geometric, 50, np.random.default_rng(3))
        assert (first.n, first.d) == (50, 2)
        np.testing.assert_array_equal(first.values, second.values)

    def test_marginal_mean(self, poisson, make_point_mass):
        data = sample(make_point_mass(poisson, [2.0, 0.5]), 20000, np.random.default_rng(0))
        np.testing.assert_allclose(data.values.mean(axis=0), [2.0, 0.5], atol=0.05)

    def test_rejects_empty_sample(self, two_atom_poisson, rng):
        with pytest.raises(DomainError):
            sample(two_atom_poisson, 0, rng)


class TestTailDiagnostics:
    def test_log_nd_needs_three_cells(self):
        with pytest.raises(DomainError):
            log_nd(1, 2)
        assert log_nd(10, 2) == pytest.approx(math.log(20))

    def test_tail_index_of_degenerate_model(self, poisson, make_point_mass):
        assert tail_index_Kn(make_point_mass(poisson, [0.0]), 100) == 0

    def test_tail_index_threshold(self, two_atom_geometric):
        n = 100_000
        K = tail_index_Kn(two_atom_geometric, n)
        threshold = log_nd(n, 2) ** 4 / n
        assert box_tail(two_atom_geometric, K) <= threshold
        assert K == 0 or box_tail(two_atom_geometric, K - 1) > threshold

    def test_tau_n_is_box_minimum(self, geometric, make_point_mass):
        model = make_point_mass(geometric, [0.5, 0.5])
        assert tau_n(model, 2) == pytest.approx(0.015625, rel=1e-13)

    def test_corner_shortcut_agrees_with_enumeration(self, two_atom_geometric, geometric, monkeypatch):
        constants = theory_constants(geometric, 0.9, 0.05, 0.5, 2)
        Kn = constants.W + 3
        enumerated = tau_n(two_atom_geometric, Kn)
        monkeypatch.setattr(settings, "TAU_ENUMERATION_CAP", 1)
        assert tau_n(two_atom_geometric, Kn, constants) == pytest.approx(enumerated, rel=1e-12)

    def test_corner_shortcut_refuses_an_interior_minimum(self, poisson, make_point_mass, monkeypatch):
        constants = theory_constants(poisson, 4.0, 0.05, 0.5, 2)
        model = make_point_mass(poisson, [constants.W + 30.0, constants.W + 30.0])
        monkeypatch.setattr(settings, "TAU_ENUMERATION_CAP", 1)
        with pytest.raises(ResourceLimitError):
            tau_n(model, constants.W, constants)

    def test_large_box_needs_constants(self, two_atom_geometric, monkeypatch):
        monkeypatch.setattr(settings, "TAU_ENUMERATION_CAP", 1)
        with pytest.raises(ResourceLimitError):
            tau_n(two_atom_geometric, 5)

    def test_zero_cell_bound(self, geometric, make_point_mass):
        model = make_point_mass(geometric, [0.5, 0.5])
        assert zero_cell_bound(model, 2, 10) == pytest.approx(9 * (1 - 0.015625) ** 10, rel=1e-12)

    def test_rate_envelope(self):
        assert rate_envelope(100, 2) == pytest.approx(math.log(200) ** 2 / 10)

    @pytest.mark.parametrize("family_name, bound", [("poisson", 4.0), ("geometric", 0.9)])
    def test_tail_bound_holds(self, request, make_scenario, family_name, bound):
        family = request.getfixturevalue(family_name)
        model = make_scenario("a", family)
        constants = theory_constants(family, bound, 0.05, 0.5, 2)
        start = max(constants.U, constants.W)
        for K in range(start, start + 11):
            assert tail_bound_check(model, constants, K).holds

    def test_tail_bound_needs_large_K(self, two_atom_poisson, poisson):
        constants = theory_constants(poisson, 4.0, 0.05, 0.5, 2)
        with pytest.raises(DomainError):
            tail_bound_check(two_atom_poisson, constants, 0)
