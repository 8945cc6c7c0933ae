"""
Path simulation subcommand.

Writes a binary path dump and, on request, the local-time field CSV.
"""

import logging
from pathlib import Path
from typing import Optional

import click

from levyclt.commands.common import CliContext, emit_json, exponent_option
from levyclt.core.exponent import parse_exponent
from levyclt.core.localtime import alpha, estimate_local_time, write_field_csv
from levyclt.core.simulate import PathConfig, simulate_path, write_path

logger = logging.getLogger(__name__)


@click.command("simulate")
@exponent_option()
@click.option("--steps", type=click.IntRange(min=1), default=None, help="Number of increments.")
@click.option("--T", "horizon", type=float, default=1.0, show_default=True, help="Time horizon.")
@click.option("--seed", type=int, default=None, help="Master seed; overrides the global --seed.")
@click.option("--index", type=click.IntRange(min=0), default=0, show_default=True, help="Path index.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Path dump target.")
@click.option("--field-eps", type=float, default=None, help="Also dump the local-time field with this bin width.")
@click.pass_obj
def simulate_cmd(
    ctx: CliContext,
    exponent: str,
    steps: Optional[int],
    horizon: float,
    seed: Optional[int],
    index: int,
    out: Optional[str],
    field_eps: Optional[float],
):
    """Simulate one path of the Levy process and dump it for replay."""
    seed = ctx.seed if seed is None else seed
    config = PathConfig(
        exponent=parse_exponent(exponent),
        horizon=horizon,
        n_steps=steps or ctx.config.N_STEPS,
        seed=seed,
        index=index,
    )
    path = simulate_path(config)
    target = Path(out) if out else ctx.out_dir / f"path_{seed}_{index}.bin"
    write_path(path, target)

    summary = {
        "path": str(target),
        "n_steps": path.n_steps,
        "dt": path.dt,
        "seed": path.seed,
        "index": index,
        "terminal": float(path.positions[-1]),
    }
    if field_eps is not None:
        field = estimate_local_time(path, eps=field_eps)
        field_path = write_field_csv(field, target.with_suffix(".field.csv"))
        summary["field"] = str(field_path)
        summary["alpha"] = alpha(field)
        summary["coverage"] = field.coverage
        summary["full_coverage"] = field.full_coverage
    logger.info(f"Simulated {path.n_steps} steps of {exponent} into {target}")
    emit_json(summary)
