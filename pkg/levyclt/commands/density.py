"""
Density subcommand.

Evaluates p_s(x) and its finite differences on an (s, x) grid, or runs the
bound audit with --audit and writes audit.csv / audit.json.
"""

import logging
from typing import Optional

import click

from levyclt.commands.common import FLOAT_LIST, CliContext, emit_json, exponent_option
from levyclt.core.audit import audit_density_bounds, write_audit
from levyclt.core.density import DensityEvaluator
from levyclt.core.exponent import parse_exponent

logger = logging.getLogger(__name__)


@click.command("density")
@exponent_option()
@click.option("--s", "s_values", type=FLOAT_LIST, default="1", show_default=True, help="Times s > 0.")
@click.option("--x", "x_values", type=FLOAT_LIST, default="0,0.5,1,3", show_default=True)
@click.option("--h", "h", type=float, default=None, help="Step for the first and second differences.")
@click.option("--audit", is_flag=True, help="Run the density bound audit instead.")
@click.option("--h-grid", type=FLOAT_LIST, default="0.2,0.1,0.05", show_default=True)
@click.option("--x-grid", type=FLOAT_LIST, default="0,0.5,1,2,5,10,20", show_default=True)
@click.pass_obj
def density_cmd(
    ctx: CliContext,
    exponent: str,
    s_values: list[float],
    x_values: list[float],
    h: Optional[float],
    audit: bool,
    h_grid: list[float],
    x_grid: list[float],
):
    """Transition densities p_s(x), their differences and the bound audit."""
    ev = DensityEvaluator(parse_exponent(exponent), abs_tol=ctx.config.QUAD_ABS_TOL)

    if audit:
        report = audit_density_bounds(ev, x_grid, h_grid, threads=ctx.threads)
        csv_path, json_path = write_audit(report, ctx.out_dir)
        logger.info(f"Audit written to {csv_path} and {json_path}")
        emit_json(report.summary())
        return

    rows = []
    for s in s_values:
        for x in x_values:
            row = {"s": s, "x": x, "density": ev.density(s, x)}
            if h is not None:
                row["h"] = h
                row["delta_h"] = ev.delta_h(s, x, h)
                row["delta_h_spectral"] = ev.delta_h_spectral(s, x, h)
                row["second_diff"] = ev.second_diff(s, x, h)
                row["second_diff_direct"] = ev.second_diff_direct(s, x, h)
            rows.append(row)
    emit_json({"exponent": ev.exponent.spec(), "rows": rows})
