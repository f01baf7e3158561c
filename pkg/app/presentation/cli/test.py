import click

from app.application.commands.test_commands import RunTestCommand
from app.application.handlers.test_handlers import TestHandler, report
from app.config import settings
from app.domain.ci_test.schemas import TestOptions
from app.infrastructure.serialization import dump
from app.presentation.cli.common import (
    METRICS,
    build_fit_options,
    emit,
    family_options,
    fit_flags,
    output_option,
    seed_option,
    threads,
)


@click.command("test")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@family_options
@click.option("--B", "B", type=click.IntRange(min=1), default=None, help="Bootstrap replicates.")
@click.option("--alpha", type=click.FloatRange(min=0, max=1, min_open=True, max_open=True), default=None)
@click.option("--metrics", type=METRICS, default=None, help="Comma separated subset of hellinger,l1,l2.")
@click.option("--eps-tail", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--no-boot", is_flag=True, help="Leave the bootstrap statistics out of the JSON.")
@fit_flags
@seed_option
@output_option
@click.pass_context
def test_command(ctx, input_path, family, B, alpha, metrics, eps_tail, no_boot, fit_overrides, seed, output):
    """Parametric-bootstrap test of conditional independence."""
    options = TestOptions(
        B=settings.BOOTSTRAP_B if B is None else B,
        alpha=settings.ALPHA if alpha is None else alpha,
        metrics=metrics or list(settings.METRICS),
        seed=seed,
        fit_options=build_fit_options(fit_overrides, 0),
        eps_tail=eps_tail,
        workers=settings.WORKERS if threads(ctx) is None else threads(ctx),
    )
    command = RunTestCommand(input_path=input_path, family=family, options=options,
                             include_boot=not no_boot, output_path=output)
    document = TestHandler().run(command)
    emit(dump(document), output)
    click.echo(report(document), err=True, nl=False)
