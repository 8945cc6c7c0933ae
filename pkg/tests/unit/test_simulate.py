"""
Unit tests for path simulation, seeding and path dumps.
"""

import math

import numpy as np
import pytest

from levyclt.core.seeding import (
    MASK64,
    STREAM_MIXTURE,
    STREAM_PATHS,
    check_seed,
    derive_key,
    path_rng,
    splitmix64,
)
from levyclt.core.simulate import (
    PathConfig,
    SamplePath,
    SimulationError,
    read_path,
    sample_stable_increment,
    simulate_path,
    simulate_paths,
    write_path,
)


# =============================================================================
# Seeding Tests
# =============================================================================

class TestSeeding:
    """Tests for counter-based seed derivation."""

    def test_splitmix_is_deterministic(self):
        """Same input, same output, 64-bit range."""
        assert splitmix64(42) == splitmix64(42)
        assert 0 <= splitmix64(MASK64) <= MASK64

    def test_keys_separate_streams_and_indices(self):
        """Stream and index each change the key."""
        base = derive_key(7, STREAM_PATHS, 0)
        assert derive_key(7, STREAM_PATHS, 0) == base
        assert derive_key(7, STREAM_MIXTURE, 0) != base
        assert derive_key(7, STREAM_PATHS, 1) != base
        assert derive_key(8, STREAM_PATHS, 0) != base

    def test_generators_replay(self):
        """A generator rebuilt from the same counter repeats its draws."""
        a = path_rng(7, 0, 3).standard_normal(5)
        b = path_rng(7, 0, 3).standard_normal(5)
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize("seed", [-1, 1 << 64])
    def test_seed_range(self, seed):
        """Seeds are unsigned 64-bit integers."""
        with pytest.raises(ValueError):
            check_seed(seed)

    def test_largest_seed_is_accepted(self):
        """2^64 - 1 is a valid seed."""
        assert check_seed(MASK64) == MASK64


# =============================================================================
# Increment Tests
# =============================================================================

class TestIncrements:
    """Tests for exact-in-law stable increments."""

    def test_gaussian_variance(self):
        """Stable(2) increments over dt = 1 have variance 2."""
        draws = sample_stable_increment(path_rng(1, 0, 0), 2.0, 1.0, 200_000)
        se = 2.0 * math.sqrt(2.0 / (draws.size - 1))
        assert abs(draws.var(ddof=1) - 2.0) <= 3 * se

    @pytest.mark.parametrize("beta", [1.2, 1.5, 1.8])
    def test_characteristic_function(self, beta):
        """E cos(lam X_dt) = exp(-dt |lam|^beta)."""
        dt, lam = 0.5, 1.3
        draws = sample_stable_increment(path_rng(2, 0, 0), beta, dt, 100_000)
        empirical = float(np.mean(np.cos(lam * draws)))
        assert empirical == pytest.approx(math.exp(-dt * lam ** beta), abs=0.015)

    def test_symmetric(self):
        """Increments are symmetric about zero."""
        draws = sample_stable_increment(path_rng(3, 0, 0), 1.5, 1.0, 100_000)
        assert float(np.mean(np.sin(draws))) == pytest.approx(0.0, abs=0.015)

    def test_scalar_draw(self):
        """size=None gives one value."""
        assert np.ndim(sample_stable_increment(path_rng(4, 0, 0), 1.5, 0.1)) == 0

    @pytest.mark.parametrize("beta,dt", [(1.0, 0.1), (2.5, 0.1), (1.5, 0.0)])
    def test_rejects_bad_parameters(self, beta, dt):
        """beta in (1, 2] and dt > 0."""
        with pytest.raises(SimulationError):
            sample_stable_increment(path_rng(5, 0, 0), beta, dt, 10)


# =============================================================================
# Path Tests
# =============================================================================

class TestPaths:
    """Tests for simulate_path and simulate_paths."""

    def test_path_shape(self, small_path):
        """n_steps + 1 positions starting at 0."""
        assert small_path.n_steps == 500
        assert small_path.positions[0] == 0.0
        assert small_path.horizon == pytest.approx(1.0)
        assert small_path.seed == 12345

    def test_replay(self, stable15):
        """Identical configs give identical paths."""
        config = PathConfig(stable15, n_steps=300, seed=9, index=4)
        np.testing.assert_array_equal(simulate_path(config).positions, simulate_path(config).positions)

    def test_indices_differ(self, stable15):
        """Different indices give different paths."""
        config = PathConfig(stable15, n_steps=300, seed=9)
        a = simulate_path(config.for_index(0)).positions
        b = simulate_path(config.for_index(1)).positions
        assert not np.array_equal(a, b)

    def test_batch_independent_of_threads(self, mixture):
        """Batches come back in index order for any worker count."""
        config = PathConfig(mixture, n_steps=200, seed=11)
        serial = simulate_paths(config, 6, threads=1)
        pooled = simulate_paths(config, 6, threads=3)
        for a, b in zip(serial, pooled):
            np.testing.assert_array_equal(a.positions, b.positions)

    def test_batch_matches_single_paths(self, stable15):
        """Path i of a batch is path i replayed alone."""
        config = PathConfig(stable15, n_steps=100, seed=5)
        batch = simulate_paths(config, 3)
        np.testing.assert_array_equal(batch[2].positions, simulate_path(config.for_index(2)).positions)

    def test_gaussian_terminal_variance(self, gaussian):
        """Var X_1 = 2 for Stable(2)."""
        config = PathConfig(gaussian, n_steps=10, seed=21)
        terminals = np.array([p.positions[-1] for p in simulate_paths(config, 4000)])
        assert terminals.var(ddof=1) == pytest.approx(2.0, rel=0.1)

    @pytest.mark.parametrize("name", ["stable15", "mixture"])
    @pytest.mark.parametrize("lam", [0.5, 1.0])
    def test_terminal_characteristic_function(self, request, name, lam):
        """E cos(lam X_T) = exp(-T psi(lam))."""
        exponent = request.getfixturevalue(name)
        config = PathConfig(exponent, horizon=0.5, n_steps=20, seed=31)
        terminals = np.array([p.positions[-1] for p in simulate_paths(config, 4000)])
        empirical = float(np.mean(np.cos(lam * terminals)))
        assert empirical == pytest.approx(math.exp(-0.5 * exponent.psi(lam)), abs=0.04)

    @pytest.mark.parametrize("lam", [0.5, 1.5])
    def test_increments_are_stationary(self, mixture, lam):
        """X_0.5 - X_0.25 has the law of X_0.25."""
        config = PathConfig(mixture, horizon=1.0, n_steps=20, seed=32)
        paths = simulate_paths(config, 4000)
        early = np.array([p.positions[5] for p in paths])
        later = np.array([p.positions[10] - p.positions[5] for p in paths])
        target = math.exp(-0.25 * mixture.psi(lam))
        assert float(np.mean(np.cos(lam * later))) == pytest.approx(target, abs=0.04)
        assert float(np.mean(np.cos(lam * later))) == pytest.approx(float(np.mean(np.cos(lam * early))), abs=0.05)

    @pytest.mark.parametrize("lam", [0.5, 1.0])
    def test_stable_self_similarity(self, stable15, lam):
        """X_0.25 has the law of 0.25^(1/beta) X_1."""
        config = PathConfig(stable15, horizon=1.0, n_steps=20, seed=33)
        paths = simulate_paths(config, 4000)
        scaled = np.array([p.positions[5] for p in paths]) * 0.25 ** (-1.0 / 1.5)
        terminal = np.array([p.positions[-1] for p in paths])
        assert float(np.mean(np.cos(lam * scaled))) == pytest.approx(
            float(np.mean(np.cos(lam * terminal))), abs=0.05
        )

    @pytest.mark.parametrize(
        "kwargs", [{"horizon": 0.0}, {"n_steps": 0}, {"seed": -1}]
    )
    def test_config_validation(self, stable15, kwargs):
        """Bad horizons, step counts and seeds are rejected."""
        with pytest.raises(SimulationError):
            PathConfig(stable15, **kwargs)


# =============================================================================
# Path Dump Tests
# =============================================================================

class TestPathDump:
    """Tests for the binary path dump."""

    def test_dump_replays(self, small_path, tmp_path):
        """A dumped path reads back bit for bit."""
        target = write_path(small_path, tmp_path / "nested" / "path.bin")
        loaded = read_path(target)
        assert loaded.dt == small_path.dt
        assert loaded.seed == small_path.seed
        np.testing.assert_array_equal(loaded.positions, small_path.positions)

    def test_rejects_foreign_file(self, tmp_path):
        """Files without the magic header are rejected."""
        target = tmp_path / "other.bin"
        target.write_bytes(b"NOTAPATH" + bytes(40))
        with pytest.raises(SimulationError):
            read_path(target)

    def test_rejects_truncated_file(self, tmp_path):
        """Body length must match the header."""
        path = SamplePath(dt=0.1, positions=np.zeros(11), seed=1)
        target = write_path(path, tmp_path / "path.bin")
        target.write_bytes(target.read_bytes()[:-8])
        with pytest.raises(SimulationError):
            read_path(target)

    def test_rejects_short_file(self, tmp_path):
        """Shorter than a header."""
        target = tmp_path / "short.bin"
        target.write_bytes(b"LEVY")
        with pytest.raises(SimulationError):
            read_path(target)
