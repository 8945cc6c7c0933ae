"""
Command-line application factory for the Levy local-time CLT laboratory.

This module builds the click command group with configuration, logging,
command registration and error handling, the way a web application factory
wires its blueprints and error handlers.
"""

import json
import logging
import sys
from typing import Any, Optional

import click
from pydantic import ValidationError

from levyclt.config import BaseConfig, get_config
from levyclt.core.audit import AuditError
from levyclt.core.constants import ConstantsError
from levyclt.core.density import DensityError
from levyclt.core.experiments import ExperimentError
from levyclt.core.exponent import ExponentError
from levyclt.core.kac_oracle import KacOracleError
from levyclt.core.localtime import LocalTimeError
from levyclt.core.quadrature import QuadratureError
from levyclt.core.schemas import SettingsError
from levyclt.core.simulate import SimulationError

logger = logging.getLogger(__name__)

EXIT_DOMAIN_ERROR = 2

# Checked in order; ValidationError subclasses ValueError and must come first
ERROR_CODES: list[tuple[type[Exception], str]] = [
    (ValidationError, "VALIDATION_ERROR"),
    (SettingsError, "SETTINGS_ERROR"),
    (ExponentError, "EXPONENT_ERROR"),
    (ConstantsError, "CONSTANTS_ERROR"),
    (KacOracleError, "KAC_ORACLE_ERROR"),
    (SimulationError, "SIMULATION_ERROR"),
    (LocalTimeError, "LOCAL_TIME_ERROR"),
    (ExperimentError, "EXPERIMENT_ERROR"),
    (AuditError, "AUDIT_ERROR"),
    (QuadratureError, "QUADRATURE_ERROR"),
    (DensityError, "DENSITY_ERROR"),
]


def setup_logging(config: BaseConfig) -> None:
    """
    Configure logging for a command run.

    Args:
        config: Active configuration (LOG_LEVEL, LOG_FORMAT).
    """
    log_level = getattr(logging, config.LOG_LEVEL.upper(), logging.INFO)

    if config.LOG_FORMAT == "json":
        formatter = logging.Formatter(
            '{"timestamp": "%(asctime)s", "level": "%(levelname)s", '
            '"logger": "%(name)s", "message": "%(message)s"}'
        )
    else:
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    # stdout carries command output
    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(formatter)
    stream_handler.setLevel(log_level)
    root_logger.addHandler(stream_handler)


def error_payload(error: Exception) -> Optional[dict[str, Any]]:
    """
    Render a known error as {code, message, details}.

    Returns:
        The payload, or None for errors without a registered code.
    """
    for error_type, code in ERROR_CODES:
        if isinstance(error, error_type):
            if isinstance(error, ValidationError):
                return {
                    "code": code,
                    "message": "Invalid configuration",
                    "details": error.errors(include_url=False, include_context=False, include_input=False),
                }
            return {"code": code, "message": str(error), "details": None}
    return None


class LevyCltGroup(click.Group):
    """Command group rendering domain errors as JSON on stderr."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except (click.exceptions.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except Exception as e:
            payload = error_payload(e)
            if payload is None:
                logger.exception("Unhandled error")
                raise
            logger.debug(f"{payload['code']}: {payload['message']}")
            click.echo(json.dumps(payload, default=str), err=True)
            ctx.exit(EXIT_DOMAIN_ERROR)


def register_commands(group: click.Group) -> None:
    """
    Register all subcommands.

    Args:
        group: Root command group
    """
    from levyclt.commands.constants import constants_cmd
    from levyclt.commands.density import density_cmd
    from levyclt.commands.experiments import clt_cmd, mean_convergence_cmd, moments_cmd, scaling_cmd
    from levyclt.commands.mean import mean_cmd
    from levyclt.commands.regularity import regularity_cmd
    from levyclt.commands.simulate import simulate_cmd

    group.add_command(constants_cmd)
    group.add_command(density_cmd)
    group.add_command(mean_cmd)
    group.add_command(simulate_cmd)
    group.add_command(clt_cmd)
    group.add_command(scaling_cmd)
    group.add_command(mean_convergence_cmd)
    group.add_command(moments_cmd)
    group.add_command(regularity_cmd)


def create_cli(config: Optional[BaseConfig] = None) -> click.Group:
    """
    Create and configure the command group.

    Args:
        config: Optional configuration object. If not provided, configuration
                is determined from the LEVYCLT_ENV environment variable.

    Returns:
        Configured click group
    """
    from levyclt.commands.common import CliContext

    config = config or get_config()

    @click.group(cls=LevyCltGroup)
    @click.option("--seed", type=int, default=None, help="Master seed (unsigned 64-bit).")
    @click.option(
        "--threads", type=click.IntRange(min=1), default=None, envvar="LEVYCLT_THREADS",
        help="Worker threads; results do not depend on this value.",
    )
    @click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Output directory.")
    @click.pass_context
    def cli(ctx: click.Context, seed: Optional[int], threads: Optional[int], out_dir: Optional[str]):
        """Verification laboratory for the L2 modulus CLT of Levy local times."""
        setup_logging(config)
        ctx.obj = CliContext.from_config(config, seed=seed, threads=threads, out_dir=out_dir)

    register_commands(cli)
    return cli


def main() -> None:
    """Console entry point."""
    create_cli()()
