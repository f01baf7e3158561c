"""Options and helpers shared by the click commands."""
import functools
from dataclasses import dataclass
from typing import List, Optional

import click

from app.config import settings
from app.domain.estimators.schemas import Metric
from app.domain.families.schemas import FamilyKind, PsdFamily
from app.domain.npmle.schemas import FitOptions
from app.infrastructure.random import fresh_seed

# Exit codes
EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2


@dataclass
class CliState:
    threads: Optional[int] = None


class SeedParam(click.ParamType):
    """A seed in [0, 2**64), or `auto` for one drawn from OS entropy."""

    name = "seed"

    def convert(self, value, param, ctx):
        if isinstance(value, int):
            seed = value
        elif str(value).strip().lower() == "auto":
            seed = fresh_seed()
            click.echo(f"seed: {seed}", err=True)
            return seed
        else:
            try:
                seed = int(str(value).strip())
            except ValueError:
                self.fail(f"{value!r} is neither an integer nor 'auto'", param, ctx)
        if not 0 <= seed < 2**64:
            self.fail("seed must lie in [0, 2**64)", param, ctx)
        return seed


SEED = SeedParam()


class MetricListParam(click.ParamType):
    """Comma separated metric names."""

    name = "metrics"

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        names = [part.strip().lower() for part in str(value).split(",") if part.strip()]
        try:
            return [Metric(name) for name in names]
        except ValueError:
            self.fail(f"unknown metric in {value!r}; choose from {', '.join(m.value for m in Metric)}", param, ctx)


METRICS = MetricListParam()


def seed_option(f):
    return click.option("--seed", type=SEED, required=True,
                        help="Random seed (integer), or 'auto' to draw one and print it.")(f)


def output_option(f):
    return click.option("-o", "--output", "output", type=click.Path(dir_okay=False, writable=True),
                        help="Write the result here instead of stdout.")(f)


def family_options(f):
    @click.option("--family", type=click.Choice([k.value for k in FamilyKind], case_sensitive=False),
                  required=True, help="Power-series family of every coordinate.")
    @click.option("--negbin-v", type=click.FloatRange(min=0, min_open=True), default=None,
                  help="Stopping parameter v of the negative binomial family.")
    @functools.wraps(f)
    def wrapper(*args, family: str, negbin_v: Optional[float], **kwargs):
        v = settings.NEGBIN_V if negbin_v is None else negbin_v
        return f(*args, family=PsdFamily.from_tag(family, v), **kwargs)

    return wrapper


def fit_flags(f):
    """Solver overrides; unset flags keep the configured defaults."""

    @click.option("--grad-tol", type=float, default=None, help="Stop when sup gradient / n falls below this.")
    @click.option("--max-iter", "max_outer_iters", type=int, default=None, help="Cap on outer iterations.")
    @click.option("--grid-size", type=int, default=None, help="Candidate draws per iteration.")
    @click.option("--modal-em-iters", type=int, default=None, help="Modal EM steps per candidate.")
    @click.option("--prune-tol", type=float, default=None, help="Weights below this are dropped.")
    @click.option("--candidate-cap", type=float, default=None, help="Upper clip of Poisson candidates.")
    @functools.wraps(f)
    def wrapper(*args, grad_tol, max_outer_iters, grid_size, modal_em_iters, prune_tol, candidate_cap, **kwargs):
        overrides = {
            "grad_tol": grad_tol,
            "max_outer_iters": max_outer_iters,
            "grid_size": grid_size,
            "modal_em_iters": modal_em_iters,
            "prune_tol": prune_tol,
            "candidate_cap": candidate_cap,
        }
        return f(*args, fit_overrides={k: v for k, v in overrides.items() if v is not None}, **kwargs)

    return wrapper


def build_fit_options(overrides: dict, seed: int) -> FitOptions:
    return FitOptions(seed=seed, **overrides)


def parse_columns(value: str) -> List[str]:
    return [c.strip() for c in value.split(",") if c.strip()]


def emit(text: str, output: Optional[str]) -> None:
    """Print text on stdout unless it has already been written to a file."""
    if not output:
        click.echo(text, nl=False)


def threads(ctx: click.Context) -> Optional[int]:
    state = ctx.find_object(CliState)
    return state.threads if state else None
