import logging
import sys

import click
from pydantic import ValidationError

from app import SCHEMA_VERSIONS, __version__
from app.config import settings, use_config_file
from app.domain.errors import NonConvergenceError, PsdMixError
from app.infrastructure.logging_config import configure_logging
from app.presentation.cli import bench, fit, ingest, simulate, test
from app.presentation.cli.common import EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_OK, CliState

logger = logging.getLogger(__name__)


class Application(click.Group):
    """Click group that maps package errors to exit codes."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_INPUT)
        except click.ClickException as error:
            error.show()
            sys.exit(EXIT_INPUT)
        except NonConvergenceError as error:
            click.echo(f"Error: {error}", err=True)
            sys.exit(EXIT_NOT_CONVERGED)
        except (PsdMixError, ValidationError, ValueError, OSError) as error:
            logger.debug("command failed", exc_info=True)
            click.echo(f"Error: {error}", err=True)
            sys.exit(EXIT_INPUT)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


def _print_version(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    click.echo(f"{settings.APP_NAME} {__version__}")
    for document, version in SCHEMA_VERSIONS.items():
        click.echo(f"  {document} schema: {version}")
    ctx.exit()


def create_application() -> click.Group:
    @click.group(cls=Application)
    @click.option("--version", is_flag=True, expose_value=False, is_eager=True, callback=_print_version,
                  help="Show the package and JSON schema versions and exit.")
    @click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None,
                  help="dotenv-format file overriding the default settings.")
    @click.option("-v", "--verbose", is_flag=True, help="Log debug messages to stderr.")
    @click.option("--threads", type=int, default=None, help="Worker processes for test and bench (<= 0: all CPUs).")
    @click.pass_context
    def cli(ctx, config_file, verbose, threads):
        """Power-series mixture estimation and conditional independence testing."""
        if config_file:
            use_config_file(config_file)
        configure_logging("DEBUG" if verbose else None)
        ctx.obj = CliState(threads=threads)

    cli.add_command(fit.fit_command)
    cli.add_command(fit.evaluate_command)
    cli.add_command(test.test_command)
    cli.add_command(simulate.simulate_command)
    cli.add_command(bench.bench_group)
    cli.add_command(ingest.ingest_command)
    return cli


app = create_application()
