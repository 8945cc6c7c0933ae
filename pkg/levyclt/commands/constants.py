"""
Spectral constants subcommand.

Computes the scaled constants over an h schedule and writes
constants.csv and constants.json.
"""

import logging

import click

from levyclt.commands.common import FLOAT_LIST, CliContext, emit_json, exponent_option
from levyclt.core.constants import limit_table, write_table
from levyclt.core.exponent import parse_exponent

logger = logging.getLogger(__name__)


@click.command("constants")
@exponent_option()
@click.option("--h", "h_schedule", type=FLOAT_LIST, default="0.1,0.01,0.001,0.0001", show_default=True,
              help="Strictly decreasing h schedule.")
@click.pass_obj
def constants_cmd(ctx: CliContext, exponent: str, h_schedule: list[float]):
    """Tabulate c_{beta,0}, c_{beta,1} and the scaled h-dependent constants."""
    table = limit_table(parse_exponent(exponent), h_schedule, threads=ctx.threads)
    csv_path, json_path = write_table(table, ctx.out_dir)
    logger.info(f"Constants written to {csv_path} and {json_path}")
    emit_json(table.to_dict())
