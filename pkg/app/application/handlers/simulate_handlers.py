import logging

from app.application.commands.simulate_commands import SimulateCommand
from app.domain.mixtures.model import sample
from app.domain.mixtures.schemas import Dataset, MixturePmf
from app.domain.synthetic.generators import (
    sample_dependent_geometric_mixture,
    sample_dependent_poisson_mixture,
    scenario_mixing,
)
from app.domain.synthetic.schemas import DependentKind, ScenarioConfig
from app.infrastructure.io.datasets import dataset_csv
from app.infrastructure.random import generator

logger = logging.getLogger(__name__)


class SimulateHandler:
    def simulate(self, command: SimulateCommand) -> Dataset:
        rng = generator(command.seed)
        if command.scenario is not None:
            config = ScenarioConfig(label=command.scenario, family=command.family, d=command.d)
            truth = MixturePmf(family=command.family, mixing=scenario_mixing(config))
            dataset = sample(truth, command.n, rng)
        elif command.dependent == DependentKind.POISSON:
            dataset = sample_dependent_poisson_mixture(command.level, command.n, rng)
        else:
            dataset = sample_dependent_geometric_mixture(command.level, command.n, rng)
        logger.info("simulated %d x %d dataset", dataset.n, dataset.d)
        return dataset

    def simulate_csv(self, command: SimulateCommand) -> str:
        text = dataset_csv(self.simulate(command))
        if command.output_path:
            with open(command.output_path, "w", newline="\n") as handle:
                handle.write(text)
        return text
