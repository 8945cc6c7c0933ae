"""
Commands package for the Levy local-time CLT laboratory.

Contains the click subcommands registered by the application factory.
"""

from levyclt.commands.constants import constants_cmd
from levyclt.commands.density import density_cmd
from levyclt.commands.experiments import clt_cmd, mean_convergence_cmd, moments_cmd, scaling_cmd
from levyclt.commands.mean import mean_cmd
from levyclt.commands.regularity import regularity_cmd
from levyclt.commands.simulate import simulate_cmd

__all__ = [
    "constants_cmd",
    "density_cmd",
    "mean_cmd",
    "simulate_cmd",
    "clt_cmd",
    "scaling_cmd",
    "mean_convergence_cmd",
    "moments_cmd",
    "regularity_cmd",
]
