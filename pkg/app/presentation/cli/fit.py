import logging

import click

from app.application.commands.fit_commands import EvaluateCommand, FitCommand
from app.application.handlers.fit_handlers import FitHandler
from app.infrastructure.serialization import dump
from app.presentation.cli.common import (
    EXIT_NOT_CONVERGED,
    METRICS,
    build_fit_options,
    emit,
    family_options,
    fit_flags,
    output_option,
    seed_option,
)

logger = logging.getLogger(__name__)


@click.command("fit")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@family_options
@fit_flags
@seed_option
@output_option
@click.pass_context
def fit_command(ctx, input_path, family, fit_overrides, seed, output):
    """Fit the NPMLE mixing distribution to a count dataset."""
    handler = FitHandler()
    command = FitCommand(input_path=input_path, family=family,
                         options=build_fit_options(fit_overrides, seed), output_path=output)
    document = handler.fit(command)
    emit(dump(document), output)
    if not document.converged:
        click.echo(f"fit did not converge (sup gradient / n = {document.sup_gradient_normalized:.3g})", err=True)
        ctx.exit(EXIT_NOT_CONVERGED)


@click.command("evaluate")
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              help="Dataset CSV to score the model against.")
@click.option("--reference", "reference_path", type=click.Path(exists=True, dir_okay=False),
              help="Mixture or fit JSON to measure distances to.")
@click.option("--metrics", type=METRICS, default="hellinger,l1,l2,linf", show_default=True)
@click.option("--eps-tail", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--certify-points", type=click.IntRange(min=1), default=None)
@click.option("--support-bound", type=click.FloatRange(min=0, min_open=True), default=None,
              help="Bound on the support coordinates (M for Poisson, q0 otherwise).")
@click.option("--delta0", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--eta0", type=click.FloatRange(min=0, max=1, min_open=True, max_open=True), default=None)
@seed_option
@output_option
def evaluate_command(model_path, data_path, reference_path, metrics, eps_tail, certify_points,
                     support_bound, delta0, eta0, seed, output):
    """Diagnostics of a fitted mixture: likelihood, certificate, distances, tail quantities."""
    handler = FitHandler()
    command = EvaluateCommand(model_path=model_path, data_path=data_path, reference_path=reference_path,
                              metrics=metrics, eps_tail=eps_tail, certify_points=certify_points,
                              certify_seed=seed, support_bound=support_bound, delta0=delta0, eta0=eta0,
                              output_path=output)
    emit(dump(handler.evaluate(command)), output)
