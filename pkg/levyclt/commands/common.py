"""
Shared plumbing for the subcommands: run context, option types and output.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import click

from levyclt.config import BaseConfig
from levyclt.core.schemas import SimulationSettings, load_yaml_settings


@dataclass
class CliContext:
    """
    Per-invocation settings resolved from flags and configuration.

    seed_flag and threads_flag hold the values given on the command line;
    they beat YAML files, which beat the configuration defaults.
    """
    config: BaseConfig
    out_dir: Path
    seed_flag: Optional[int] = None
    threads_flag: Optional[int] = None

    @classmethod
    def from_config(
        cls,
        config: BaseConfig,
        seed: Optional[int] = None,
        threads: Optional[int] = None,
        out_dir: Optional[str] = None,
    ) -> "CliContext":
        return cls(
            config=config,
            out_dir=Path(out_dir or config.OUT_DIR),
            seed_flag=seed,
            threads_flag=threads,
        )

    @property
    def seed(self) -> int:
        return self.config.SEED if self.seed_flag is None else self.seed_flag

    @property
    def threads(self) -> Optional[int]:
        return self.config.THREADS if self.threads_flag is None else self.threads_flag

    def defaults(self) -> dict[str, Any]:
        """Experiment defaults taken from the configuration."""
        cfg = self.config
        return {
            "seed": cfg.SEED,
            "threads": cfg.THREADS,
            "n_paths": cfg.N_PATHS,
            "n_steps": cfg.N_STEPS,
            "h_schedule": list(cfg.H_SCHEDULE),
            "bins_per_h": cfg.BINS_PER_H,
        }

    def settings(self, model: type[SimulationSettings], config_file: Optional[str], **flags: Any):
        """
        Validated experiment settings: configuration defaults, then the YAML
        file, then command-line flags.

        Raises:
            pydantic.ValidationError: If the merged settings are invalid.
        """
        data = {k: v for k, v in self.defaults().items() if k in model.model_fields and v is not None}
        if config_file:
            data.update(load_yaml_settings(Path(config_file)))
        flags = {"seed": self.seed_flag, "threads": self.threads_flag, **flags}
        data.update({k: v for k, v in flags.items() if v is not None})
        return model.model_validate(data)


class FloatList(click.ParamType):
    """Comma separated floats, e.g. 0.2,0.1,0.05."""

    name = "floats"

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        try:
            return [float(part) for part in str(value).split(",") if part.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma separated list of numbers", param, ctx)


FLOAT_LIST = FloatList()


def exponent_option(default: Optional[str] = "stable:1.5"):
    return click.option(
        "--exponent", default=default, show_default=default is not None,
        help='Exponent spec, "stable:1.5" or "mix:1.0*1.8+1.0*1.2".',
    )


config_file_option = click.option(
    "--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None,
    help="YAML file with experiment settings; flags override file values.",
)


def emit_json(payload: Any) -> None:
    """Print a JSON document on stdout."""
    click.echo(json.dumps(payload, indent=2, default=str))
