import click

from app.application.commands.simulate_commands import SimulateCommand
from app.application.handlers.simulate_handlers import SimulateHandler
from app.config import settings
from app.domain.families.schemas import FamilyKind, PsdFamily
from app.domain.synthetic.schemas import DependentKind, ScenarioLabel
from app.presentation.cli.common import emit, output_option, seed_option


@click.command("simulate")
@click.option("--scenario", type=click.Choice([s.value for s in ScenarioLabel]), default=None,
              help="Independent mixture configuration a-e.")
@click.option("--family", type=click.Choice([k.value for k in FamilyKind], case_sensitive=False), default=None)
@click.option("--negbin-v", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--d", "d", type=click.Choice(["2", "4"]), default="2", show_default=True)
@click.option("--poisson-dep", "beta", type=float, default=None, help="Common-shock Poisson mixture with this beta.")
@click.option("--geometric-dep", "lam", type=float, default=None, help="Gumbel geometric mixture with this lambda.")
@click.option("--n", "n", type=click.IntRange(min=1), required=True, help="Number of rows.")
@seed_option
@output_option
def simulate_command(scenario, family, negbin_v, d, beta, lam, n, seed, output):
    """Draw a synthetic count dataset as CSV."""
    if beta is not None and lam is not None:
        raise click.UsageError("--poisson-dep and --geometric-dep are mutually exclusive")
    dependent, level = None, None
    if beta is not None:
        dependent, level = DependentKind.POISSON, beta
    elif lam is not None:
        dependent, level = DependentKind.GEOMETRIC, lam
    psd = None
    if family is not None:
        psd = PsdFamily.from_tag(family, settings.NEGBIN_V if negbin_v is None else negbin_v)
    command = SimulateCommand(scenario=scenario, family=psd, d=int(d), dependent=dependent, level=level,
                              n=n, seed=seed, output_path=output)
    emit(SimulateHandler().simulate_csv(command), output)
