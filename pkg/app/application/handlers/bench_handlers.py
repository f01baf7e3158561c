from typing import Optional, Tuple

import pandas as pd

from app.application.commands.bench_commands import BenchCvCommand, BenchPowerCommand, BenchRateCommand
from app.domain.experiments.runners import (
    cv_spec,
    cv_table,
    run_cv_experiment,
    run_power_experiment,
    run_rate_experiment,
)
from app.domain.experiments.schemas import RunSpec
from app.infrastructure.io.datasets import read_dataset
from app.infrastructure.serialization import ManifestDocument, write_document


def table_csv(table: pd.DataFrame) -> str:
    return table.to_csv(index=False, lineterminator="\n")


class BenchHandler:
    def _emit(self, experiment: str, spec: RunSpec, table: pd.DataFrame,
              output_path: Optional[str], manifest_path: Optional[str]) -> str:
        text = table_csv(table)
        if output_path:
            with open(output_path, "w", newline="\n") as handle:
                handle.write(text)
        if manifest_path:
            manifest = ManifestDocument(experiment=experiment, spec=spec.model_dump(mode="json"),
                                        spec_hash=spec.spec_hash())
            write_document(manifest, manifest_path)
        return text

    def rate(self, command: BenchRateCommand) -> str:
        table = run_rate_experiment(command.spec, command.workers)
        return self._emit("rate", command.spec, table, command.output_path, command.manifest_path)

    def power(self, command: BenchPowerCommand) -> str:
        table = run_power_experiment(command.spec, command.workers)
        return self._emit("power", command.spec, table, command.output_path, command.manifest_path)

    def cv(self, command: BenchCvCommand) -> Tuple[str, pd.DataFrame]:
        """Long-format CSV text and the estimator by metric table of means."""
        dataset = read_dataset(command.input_path)
        args = (dataset, command.family, command.repeats, command.seed, command.fit_options, command.eps_tail)
        table = run_cv_experiment(*args, workers=command.workers)
        text = self._emit("cv", cv_spec(*args), table, command.output_path, command.manifest_path)
        return text, cv_table(table)
