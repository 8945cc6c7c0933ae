"""
Monte Carlo experiment subcommands: clt, scaling, mean-convergence, moments.

Settings come from an optional YAML file, overridden by flags; reports are
written to the output directory and a short summary is printed.
"""

import logging
from typing import Optional

import click

from levyclt.commands.common import (
    FLOAT_LIST,
    CliContext,
    config_file_option,
    emit_json,
    exponent_option,
)
from levyclt.core.experiments import (
    clt_experiment,
    mean_convergence_experiment,
    moment_bound_experiment,
    scaling_experiment,
    write_report,
)
from levyclt.core.schemas import (
    CenteringMode,
    CltConfig,
    ExperimentReport,
    MeanConvergenceConfig,
    MomentBoundConfig,
    ScalingConfig,
)

logger = logging.getLogger(__name__)

paths_option = click.option("--paths", "n_paths", type=int, default=None, help="Number of paths.")
steps_option = click.option("--steps", "n_steps", type=int, default=None, help="Increments per path.")


def _finish(ctx: CliContext, report: ExperimentReport) -> None:
    written = write_report(report, ctx.out_dir)
    emit_json({
        "kind": report.kind.value,
        "verdicts": report.verdicts,
        "summary": report.summary,
        "files": [str(p) for p in written],
    })


@click.command("clt")
@exponent_option(default=None)
@click.option("--h", "h_schedule", type=FLOAT_LIST, default=None, help="Decreasing h schedule.")
@paths_option
@steps_option
@click.option("--bins-per-h", type=int, default=None, help="eps = min(h) / bins-per-h.")
@click.option("--centering", type=click.Choice([m.value for m in CenteringMode]), default=None)
@config_file_option
@click.pass_obj
def clt_cmd(ctx: CliContext, exponent, h_schedule, n_paths, n_steps, bins_per_h,
            centering: Optional[str], config_file):
    """Normalized L2 moduli against the simulated mixture limit."""
    config = ctx.settings(
        CltConfig, config_file,
        exponent=exponent, h_schedule=h_schedule, n_paths=n_paths, n_steps=n_steps,
        bins_per_h=bins_per_h, centering=centering,
    )
    _finish(ctx, clt_experiment(config))


@click.command("scaling")
@exponent_option(default=None)
@click.option("--t", "t_values", type=FLOAT_LIST, default=None, help="Times in (0, 1].")
@paths_option
@steps_option
@click.option("--eps", type=float, default=None, help="Bin width at t = 1.")
@config_file_option
@click.pass_obj
def scaling_cmd(ctx: CliContext, exponent, t_values, n_paths, n_steps, eps, config_file):
    """Scaling law of alpha_t for stable exponents."""
    config = ctx.settings(
        ScalingConfig, config_file,
        exponent=exponent, t_values=t_values, n_paths=n_paths, n_steps=n_steps, eps=eps,
    )
    _finish(ctx, scaling_experiment(config))


@click.command("mean-convergence")
@exponent_option(default=None)
@click.option("--h", "h_schedule", type=FLOAT_LIST, default=None, help="Decreasing h schedule.")
@paths_option
@steps_option
@click.option("--bins-per-h", type=int, default=None, help="eps = min(h) / bins-per-h.")
@config_file_option
@click.pass_obj
def mean_convergence_cmd(ctx: CliContext, exponent, h_schedule, n_paths, n_steps, bins_per_h, config_file):
    """Monte Carlo means of J_h against the exact mean."""
    config = ctx.settings(
        MeanConvergenceConfig, config_file,
        exponent=exponent, h_schedule=h_schedule, n_paths=n_paths, n_steps=n_steps,
        bins_per_h=bins_per_h,
    )
    _finish(ctx, mean_convergence_experiment(config))


@click.command("moments")
@exponent_option(default=None)
@click.option("--t", "t_grid", type=FLOAT_LIST, default=None, help="Times in (0, 1].")
@paths_option
@steps_option
@click.option("--eps", type=float, default=None, help="Bin width at t = 1.")
@config_file_option
@click.pass_obj
def moments_cmd(ctx: CliContext, exponent, t_grid, n_paths, n_steps, eps, config_file):
    """L^n norms of alpha_t against the moment bound."""
    config = ctx.settings(
        MomentBoundConfig, config_file,
        exponent=exponent, t_grid=t_grid, n_paths=n_paths, n_steps=n_steps, eps=eps,
    )
    _finish(ctx, moment_bound_experiment(config))
