"""
Discretized sample paths of symmetric stable and stable-mixture processes.

Increments of Stable(beta) over a step dt are drawn exactly in law:
Gaussian with variance 2 dt for beta = 2, and dt^(1/beta) times a standard
symmetric stable variable from the Chambers-Mallows-Stuck transform
otherwise.  A mixture sum c_j |lam|^beta_j is realised as a sum of
independent components, component j running on the time scale c_j dt.
"""

import logging
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from levyclt.core.exponent import BETA_MAX, BETA_MIN, LevyExponent
from levyclt.core.parallel import ordered_map
from levyclt.core.seeding import STREAM_PATHS, check_seed, path_rng

logger = logging.getLogger(__name__)

DUMP_MAGIC = b"LEVYPATH"
DUMP_VERSION = 1
_HEADER = struct.Struct("<8sIQdQ")


class SimulationError(ValueError):
    """Raised for invalid simulation parameters or corrupt path dumps."""
    pass


@dataclass(frozen=True)
class PathConfig:
    """
    Parameters of one simulated path.

    Attributes:
        exponent: Levy exponent.
        horizon: Time horizon T > 0.
        n_steps: Number of increments.
        seed: Unsigned 64-bit master seed.
        stream: Seed stream; experiments use disjoint streams.
        index: Path counter inside the stream.
    """
    exponent: LevyExponent
    horizon: float = 1.0
    n_steps: int = 100_000
    seed: int = 0
    stream: int = STREAM_PATHS
    index: int = 0

    def __post_init__(self):
        if not self.horizon > 0 or not math.isfinite(self.horizon):
            raise SimulationError(f"Horizon must be positive, got {self.horizon}")
        if int(self.n_steps) < 1:
            raise SimulationError(f"n_steps must be at least 1, got {self.n_steps}")
        try:
            check_seed(self.seed)
        except ValueError as e:
            raise SimulationError(str(e)) from e

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps

    def for_index(self, index: int) -> "PathConfig":
        return PathConfig(self.exponent, self.horizon, self.n_steps, self.seed, self.stream, index)


@dataclass(frozen=True)
class SamplePath:
    """Positions X_{k dt}, k = 0..n_steps, with positions[0] = 0."""
    dt: float
    positions: np.ndarray
    seed: int = 0

    @property
    def n_steps(self) -> int:
        return len(self.positions) - 1

    @property
    def horizon(self) -> float:
        return self.dt * self.n_steps


def sample_stable_increment(
    rng: np.random.Generator,
    beta: float,
    dt: float,
    size: Optional[int] = None,
) -> Union[float, np.ndarray]:
    """
    Draw X_dt for Stable(beta), E exp(i lam X_dt) = exp(-dt |lam|^beta).

    Args:
        rng: Generator to draw from.
        beta: Index in (1, 2].
        dt: Time step > 0.
        size: Number of draws; None for a scalar.

    Raises:
        SimulationError: For beta outside (1, 2] or dt <= 0.
    """
    if not (BETA_MIN < beta <= BETA_MAX):
        raise SimulationError(f"beta must lie in (1, 2], got {beta}")
    if not dt > 0:
        raise SimulationError(f"dt must be positive, got {dt}")

    if beta == 2.0:
        return rng.normal(0.0, math.sqrt(2.0 * dt), size)

    u = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size)
    e = rng.exponential(1.0, size)
    s = (
        np.sin(beta * u) / np.cos(u) ** (1.0 / beta)
        * (np.cos((1.0 - beta) * u) / e) ** ((1.0 - beta) / beta)
    )
    return dt ** (1.0 / beta) * s


def simulate_path(config: PathConfig) -> SamplePath:
    """
    Simulate one path; identical configs give identical paths.

    Mixture components are drawn one after the other from the same
    per-path generator.
    """
    rng = path_rng(config.seed, config.stream, config.index)
    dt = config.dt
    increments = np.zeros(config.n_steps)
    for weight, beta in config.exponent.components:
        increments += sample_stable_increment(rng, beta, weight * dt, config.n_steps)
    positions = np.concatenate(([0.0], np.cumsum(increments)))
    return SamplePath(dt=dt, positions=positions, seed=config.seed)


def simulate_paths(config: PathConfig, n_paths: int, threads: Optional[int] = 1) -> list[SamplePath]:
    """Paths with indices 0..n_paths-1 of the config's stream, in index order."""
    return ordered_map(lambda i: simulate_path(config.for_index(i)), range(n_paths), threads)


# ============================================================================
# Binary path dump
# ============================================================================

def write_path(path: SamplePath, target: Path) -> Path:
    """
    Write a path as header + little-endian float64 positions.

    Header: magic, version, n_steps, dt, seed.
    """
    target.parent.mkdir(parents=True, exist_ok=True)
    header = _HEADER.pack(DUMP_MAGIC, DUMP_VERSION, path.n_steps, path.dt, path.seed)
    with open(target, "wb") as f:
        f.write(header)
        f.write(np.asarray(path.positions, dtype="<f8").tobytes())
    logger.debug(f"Wrote path with {path.n_steps} steps to {target}")
    return target


def read_path(source: Path) -> SamplePath:
    """Read a path written by write_path."""
    data = Path(source).read_bytes()
    if len(data) < _HEADER.size:
        raise SimulationError(f"{source} is too short for a path header")
    magic, version, n_steps, dt, seed = _HEADER.unpack_from(data)
    if magic != DUMP_MAGIC:
        raise SimulationError(f"{source} is not a path dump")
    if version != DUMP_VERSION:
        raise SimulationError(f"Unsupported path dump version {version}")
    body = data[_HEADER.size:]
    if len(body) != 8 * (n_steps + 1):
        raise SimulationError(
            f"{source} holds {len(body) // 8} positions, expected {n_steps + 1}"
        )
    positions = np.frombuffer(body, dtype="<f8").astype(float)
    return SamplePath(dt=dt, positions=positions, seed=seed)
