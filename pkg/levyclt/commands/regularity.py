"""
Regularity audit subcommand.
"""

import click
import numpy as np

from levyclt.commands.common import CliContext, emit_json, exponent_option
from levyclt.core.exponent import check_regularity, parse_exponent


@click.command("regularity")
@exponent_option()
@click.option("--lam-min", type=float, default=1e-3, show_default=True)
@click.option("--lam-max", type=float, default=1e6, show_default=True)
@click.option("--points", type=click.IntRange(min=2), default=46, show_default=True)
@click.pass_obj
def regularity_cmd(ctx: CliContext, exponent: str, lam_min: float, lam_max: float, points: int):
    """Audit the derivative and integrability conditions on a log grid."""
    if not 0 < lam_min < lam_max:
        raise click.BadParameter("need 0 < lam-min < lam-max", param_hint="--lam-min")
    grid = np.geomspace(lam_min, lam_max, points)
    emit_json(check_regularity(parse_exponent(exponent), grid).to_dict())
