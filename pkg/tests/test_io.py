import json

import numpy as np
import pandas as pd
import pytest

from app import SCHEMA_VERSIONS
from app.domain.errors import InputError
from app.domain.mixtures.schemas import Dataset, MixingDistribution, MixturePmf
from app.domain.npmle.schemas import FitOptions
from app.domain.npmle.solver import fit
from app.infrastructure.io.datasets import dataset_csv, ingest_wide, read_dataset, write_dataset
from app.infrastructure.serialization import (
    FitDocument,
    MixtureDocument,
    dump,
    read_mixture,
    write_document,
)


class TestReadDataset:
    def test_plain_rows(self, write_csv):
        data = read_dataset(write_csv("0,1\n2,3\n4,5\n"))
        assert data.values.tolist() == [[0, 1], [2, 3], [4, 5]]

    def test_header_is_detected(self, write_csv):
        data = read_dataset(write_csv("x,y\n1,2\n"))
        assert data.values.tolist() == [[1, 2]]

    def test_empty_cell_in_first_row_is_not_a_header(self, write_csv):
        with pytest.raises(InputError) as error:
            read_dataset(write_csv("1,\n2,3\n"))
        assert error.value.row == 1

    def test_mixed_first_row_is_not_a_header(self, write_csv):
        with pytest.raises(InputError) as error:
            read_dataset(write_csv("x,2\n1,2\n"))
        assert error.value.row == 1

    def test_single_column(self, write_csv):
        assert read_dataset(write_csv("3\n4\n")).d == 1

    def test_negative_entry(self, write_csv):
        with pytest.raises(InputError) as error:
            read_dataset(write_csv("1,2\n3,-4\n"))
        assert (error.value.row, error.value.column) == (2, "2")

    def test_non_integer_entry_with_header(self, write_csv):
        with pytest.raises(InputError) as error:
            read_dataset(write_csv("a,b\n1,2\n1.5,2\n"))
        assert (error.value.row, error.value.column) == (3, "a")

    def test_empty_file(self, write_csv):
        with pytest.raises(InputError):
            read_dataset(write_csv(""))

    def test_header_only(self, write_csv):
        with pytest.raises(InputError):
            read_dataset(write_csv("a,b\n"))


class TestWriteDataset:
    def test_csv_text(self):
        assert dataset_csv(Dataset(np.array([[1, 2], [3, 4]]))) == "1,2\n3,4\n"

    def test_with_header(self):
        assert dataset_csv(Dataset(np.array([[1, 2]])), ["s1", "s2"]) == "s1,s2\n1,2\n"

    def test_round_trip(self, tmp_path):
        data = Dataset(np.array([[0, 7], [12, 3]]))
        path = tmp_path / "out.csv"
        write_dataset(data, path)
        np.testing.assert_array_equal(read_dataset(path).values, data.values)


class TestIngest:
    @pytest.fixture
    def wide(self):
        return pd.DataFrame({
            "station": ["A", "B", "C"],
            "h1": [1, 2, 3],
            "h2": [4, 5, 6],
            "h3": [7, 8, 9],
            "h4": [0, 0, 1],
        })

    def test_csv_selection_keeps_order(self, wide, tmp_path):
        path = tmp_path / "wide.csv"
        wide.to_csv(path, index=False)
        data = ingest_wide(path, ["h3", "h1"])
        assert data.values.tolist() == [[7, 1], [8, 2], [9, 3]]

    def test_excel(self, wide, tmp_path):
        path = tmp_path / "wide.xlsx"
        wide.to_excel(path, index=False, engine="openpyxl")
        assert ingest_wide(path, ["h2", "h4"]).values.tolist() == [[4, 0], [5, 0], [6, 1]]

    def test_missing_column(self, wide, tmp_path):
        path = tmp_path / "wide.csv"
        wide.to_csv(path, index=False)
        with pytest.raises(InputError) as error:
            ingest_wide(path, ["h1", "h9"])
        assert error.value.column == "h9"

    def test_non_integer_cell(self, write_csv):
        with pytest.raises(InputError) as error:
            ingest_wide(write_csv("a,b\n1,2\nx,3\n"), ["a", "b"])
        assert (error.value.row, error.value.column) == (3, "a")


class TestSerialization:
    def test_mixture_document_round_trip(self, two_atom_geometric, tmp_path):
        path = tmp_path / "mixture.json"
        write_document(MixtureDocument.from_model(two_atom_geometric), path)
        assert read_mixture(path) == two_atom_geometric

    def test_negbin_keeps_stopping_parameter(self, negbin, make_point_mass):
        document = json.loads(dump(MixtureDocument.from_model(make_point_mass(negbin, [0.3]))))
        assert document == {"family": "negbin", "v": 2.0, "d": 1, "support": [[0.3]], "weights": [1.0]}

    def test_fit_document(self, poisson, tmp_path):
        result = fit(Dataset(np.array([[0, 0]])), poisson, FitOptions(seed=0))
        document = FitDocument.from_result(result)
        text = dump(document)
        assert text.endswith("}\n")
        payload = json.loads(text)
        assert payload["schema_version"] == SCHEMA_VERSIONS["fit"]
        assert payload["converged"] is True
        assert payload["model"]["weights"] == [1.0]
        path = tmp_path / "fit.json"
        path.write_text(text)
        assert read_mixture(path) == result.model

    def test_floats_survive_round_trip(self, geometric, tmp_path):
        weights = [0.25, 0.25, 0.5]
        model = MixturePmf(family=geometric, mixing=MixingDistribution(
            dim=1, support=[[1 / 3], [0.123456789012345678], [2 / 7]], weights=weights))
        path = tmp_path / "m.json"
        write_document(MixtureDocument.from_model(model), path)
        assert read_mixture(path).mixing.support == model.mixing.support

    def test_floats_carry_seventeen_digits(self, poisson):
        model = MixturePmf(family=poisson, mixing=MixingDistribution(dim=1, support=[[0.1], [2.0]], weights=[0.5, 0.5]))
        text = dump(MixtureDocument.from_model(model))
        assert "0.10000000000000001" in text
        assert "2.0" in text
        assert json.loads(text)["support"] == [[0.1], [2.0]]

    def test_rejects_foreign_json(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text('{"family": "poisson", "d": 1, "support": [[1.0]], "weights": [1.0], "extra": 1}')
        with pytest.raises(InputError):
            read_mixture(path)
