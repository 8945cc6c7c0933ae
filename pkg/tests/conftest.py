"""
Shared pytest fixtures for LevyCLT tests.
"""

import pytest
from click.testing import CliRunner

from levyclt.cli import create_cli
from levyclt.config import TestConfig
from levyclt.core.density import DensityEvaluator
from levyclt.core.exponent import LevyExponent
from levyclt.core.simulate import PathConfig, simulate_path


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False,
        help="Run the full-size acceptance experiments.",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size Monte Carlo acceptance run")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def test_config():
    """Configuration with small Monte Carlo defaults."""
    return TestConfig()


@pytest.fixture
def gaussian():
    """Stable(2): psi(lam) = lam^2, X_s ~ N(0, 2s)."""
    return LevyExponent.stable(2.0)


@pytest.fixture
def stable15():
    """Stable(1.5)."""
    return LevyExponent.stable(1.5)


@pytest.fixture
def mixture():
    """psi(lam) = |lam|^1.8 + |lam|^1.2."""
    return LevyExponent.mixture([(1.0, 1.8), (1.0, 1.2)])


@pytest.fixture
def gaussian_ev(gaussian):
    """Density evaluator for Stable(2)."""
    return DensityEvaluator(gaussian)


@pytest.fixture
def stable15_ev(stable15):
    """Density evaluator for Stable(1.5)."""
    return DensityEvaluator(stable15)


@pytest.fixture
def small_path(stable15):
    """A short Stable(1.5) path on [0, 1]."""
    return simulate_path(PathConfig(stable15, horizon=1.0, n_steps=500, seed=12345))


@pytest.fixture
def cli(mocker, test_config):
    """Command group on the test configuration; logging setup is stubbed."""
    mocker.patch("levyclt.cli.setup_logging")
    return create_cli(test_config)


@pytest.fixture
def runner():
    """Click runner with separate stdout and stderr."""
    return CliRunner()
