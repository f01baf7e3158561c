from app.application.commands.ingest_commands import IngestCommand
from app.infrastructure.io.datasets import dataset_csv, ingest_wide


class IngestHandler:
    def ingest(self, command: IngestCommand) -> str:
        dataset = ingest_wide(command.input_path, command.columns)
        text = dataset_csv(dataset, command.columns)
        if command.output_path:
            with open(command.output_path, "w", newline="\n") as handle:
                handle.write(text)
        return text
