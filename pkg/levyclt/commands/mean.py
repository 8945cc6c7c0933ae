"""
Exact mean subcommand.

Prints both representations of E J_h(t), the leading-order split, E alpha_t
and the variance bound terms as JSON.
"""

from typing import Optional

import click

from levyclt.commands.common import CliContext, emit_json, exponent_option
from levyclt.core.density import DensityEvaluator
from levyclt.core.exponent import parse_exponent
from levyclt.core.kac_oracle import (
    mean_alpha,
    mean_alpha_time_domain,
    mean_sq_increment,
    mean_sq_increment_report,
    variance_bound_check,
)


@click.command("mean")
@exponent_option()
@click.option("--t", "t", type=float, default=1.0, show_default=True, help="Time in (0, 1].")
@click.option("--h", "h", type=float, default=0.05, show_default=True, help="Step h in (0, 1).")
@click.option("--eps", "bin_width", type=float, default=None, help="Also report the means of the binned estimator.")
@click.pass_obj
def mean_cmd(ctx: CliContext, exponent: str, t: float, h: float, bin_width: Optional[float]):
    """Exact E J_h(t) and E alpha_t from the Kac moment formula."""
    levy = parse_exponent(exponent)
    ev = DensityEvaluator(levy, abs_tol=ctx.config.QUAD_ABS_TOL)
    report = mean_sq_increment_report(levy, t, h, ev)
    payload = {
        "mean_sq_increment": report.to_dict(),
        "mean_alpha": mean_alpha(levy, t),
        "mean_alpha_time_domain": mean_alpha_time_domain(levy, t, ev),
        "variance_bound": variance_bound_check(levy, t, h).to_dict(),
    }
    if bin_width is not None:
        payload["binned"] = {
            "eps": bin_width,
            "mean_sq_increment": mean_sq_increment(levy, t, h, bin_width),
            "mean_alpha": mean_alpha(levy, t, bin_width),
        }
    emit_json(payload)
