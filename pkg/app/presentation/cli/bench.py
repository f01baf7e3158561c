import click

from app.application.commands.bench_commands import BenchCvCommand, BenchPowerCommand, BenchRateCommand
from app.application.handlers.bench_handlers import BenchHandler
from app.domain.experiments.schemas import PowerRunSpec, RateRunSpec
from app.domain.synthetic.schemas import DependentKind, ScenarioLabel
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


def manifest_option(f):
    return click.option("--manifest", "manifest", type=click.Path(dir_okay=False, writable=True),
                        help="Write the JSON replay manifest here.")(f)


def _floats(value):
    return [float(x) for x in value.split(",")] if value else None


def _ints(value):
    return [int(x) for x in value.split(",")] if value else None


def _drop_unset(fields: dict) -> dict:
    return {k: v for k, v in fields.items() if v is not None}


@click.group("bench")
def bench_group():
    """Desk-scale simulation studies."""


@bench_group.command("rate")
@click.option("--scenario", type=click.Choice([s.value for s in ScenarioLabel]), required=True)
@family_options
@click.option("--d", "d", type=click.Choice(["2", "4"]), default="2", show_default=True)
@click.option("--n-grid", default=None, help="Comma separated sample sizes.")
@click.option("--replications", type=click.IntRange(min=1), default=None)
@click.option("--metrics", type=METRICS, default=None)
@click.option("--eps-tail", type=click.FloatRange(min=0, min_open=True), default=None)
@fit_flags
@seed_option
@output_option
@manifest_option
@click.pass_context
def rate_command(ctx, scenario, family, d, n_grid, replications, metrics, eps_tail, fit_overrides, seed,
                 output, manifest):
    """sqrt(n)-scaled distances of the three estimators to the truth."""
    spec = RateRunSpec(**_drop_unset({
        "label": scenario, "family": family, "d": int(d), "n_grid": _ints(n_grid),
        "replications": replications, "metrics": metrics, "eps_tail": eps_tail, "seed": seed,
        "fit_options": build_fit_options(fit_overrides, 0),
    }))
    command = BenchRateCommand(spec=spec, workers=threads(ctx), output_path=output, manifest_path=manifest)
    emit(BenchHandler().rate(command), output)


@bench_group.command("power")
@click.option("--kind", type=click.Choice([k.value for k in DependentKind]), required=True)
@click.option("--levels", default=None, help="Comma separated beta (poisson) or lambda (geometric) values.")
@click.option("--replications", type=click.IntRange(min=1), default=None)
@click.option("--B", "B", type=click.IntRange(min=1), default=None)
@click.option("--alpha", type=click.FloatRange(min=0, max=1, min_open=True, max_open=True), default=None)
@click.option("--n", "n", type=click.IntRange(min=2), default=None)
@click.option("--metrics", type=METRICS, default=None)
@fit_flags
@seed_option
@output_option
@manifest_option
@click.pass_context
def power_command(ctx, kind, levels, replications, B, alpha, n, metrics, fit_overrides, seed, output, manifest):
    """Rejection frequency of the conditional independence test against dependence strength."""
    spec = PowerRunSpec(**_drop_unset({
        "kind": kind, "levels": _floats(levels), "replications": replications, "B": B, "alpha": alpha,
        "n": n, "metrics": metrics, "seed": seed, "fit_options": build_fit_options(fit_overrides, 0),
    }))
    command = BenchPowerCommand(spec=spec, workers=threads(ctx), output_path=output, manifest_path=manifest)
    emit(BenchHandler().power(command), output)


@bench_group.command("cv")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@family_options
@click.option("--repeats", type=click.IntRange(min=1), default=None)
@click.option("--eps-tail", type=click.FloatRange(min=0, min_open=True), default=None)
@fit_flags
@seed_option
@output_option
@manifest_option
@click.pass_context
def cv_command(ctx, input_path, family, repeats, eps_tail, fit_overrides, seed, output, manifest):
    """2-fold cross-validation of the three estimators on a dataset."""
    command = BenchCvCommand(input_path=input_path, family=family, repeats=repeats, seed=seed,
                             fit_options=build_fit_options(fit_overrides, 0), eps_tail=eps_tail,
                             workers=threads(ctx), output_path=output, manifest_path=manifest)
    text, means = BenchHandler().cv(command)
    emit(text, output)
    click.echo(means.to_string(float_format=lambda x: f"{x:.4f}"), err=True)
