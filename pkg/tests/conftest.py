import logging

import numpy as np
import pytest

from app.config import settings
from app.domain.families.schemas import PsdFamily
from app.domain.mixtures.schemas import Dataset, MixingDistribution, MixturePmf
from app.domain.npmle.schemas import FitOptions
from app.domain.synthetic.generators import scenario_mixing
from app.domain.synthetic.schemas import ScenarioConfig, ScenarioLabel


@pytest.fixture(autouse=True)
def restore_settings():
    """The CLI `--config` option rewrites the shared settings in place."""
    snapshot = settings.model_dump()
    yield
    for field, value in snapshot.items():
        setattr(settings, field, value)


@pytest.fixture(autouse=True)
def reset_app_logger():
    yield
    logger = logging.getLogger("app")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def poisson():
    return PsdFamily.poisson()


@pytest.fixture
def geometric():
    return PsdFamily.geometric()


@pytest.fixture
def negbin():
    return PsdFamily.negbin(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def point_mass(family: PsdFamily, theta) -> MixturePmf:
    theta = [float(t) for t in np.atleast_1d(theta)]
    return MixturePmf(family=family, mixing=MixingDistribution(dim=len(theta), support=[theta], weights=[1.0]))


def scenario_model(label: str, family: PsdFamily, d: int = 2) -> MixturePmf:
    config = ScenarioConfig(label=ScenarioLabel(label), family=family, d=d)
    return MixturePmf(family=family, mixing=scenario_mixing(config))


@pytest.fixture
def two_atom_geometric(geometric):
    return scenario_model("a", geometric)


@pytest.fixture
def two_atom_poisson(poisson):
    return scenario_model("a", poisson)


@pytest.fixture
def fast_fit_options():
    return FitOptions(grid_size=10, max_outer_iters=40, seed=7)


@pytest.fixture
def write_csv(tmp_path):
    def write(text: str, name: str = "data.csv"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


@pytest.fixture
def small_dataset():
    return Dataset(np.array([[0, 1], [0, 1], [2, 0], [1, 1], [3, 2]]))


@pytest.fixture
def make_point_mass():
    return point_mass


@pytest.fixture
def make_scenario():
    return scenario_model
