import click

from app.application.commands.ingest_commands import IngestCommand
from app.application.handlers.ingest_handlers import IngestHandler
from app.presentation.cli.common import emit, output_option, parse_columns


@click.command("ingest")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--columns", required=True, help="Comma separated columns, in output order.")
@output_option
def ingest_command(input_path, columns, output):
    """Select count columns of a wide CSV or Excel table into a dataset CSV."""
    command = IngestCommand(input_path=input_path, columns=parse_columns(columns), output_path=output)
    emit(IngestHandler().ingest(command), output)
