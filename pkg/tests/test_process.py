"""Tests for path sampling and the shared path functionals."""

import math

import numpy as np
import pytest

from app.config import RunConfig
from app.core.arith import build_mollifier, sieve
from app.core.errors import CapacityError, DomainError
from app.core.oracle import BrownianPath
from app.core.process import (
    ModelTables,
    ProcessPath,
    StatisticSpec,
    Trajectory,
    arcsine_statistic,
    evaluate_statistic,
    log_measure_statistic,
    max_statistic,
    negative_measure,
    normalization,
    occupation_functional,
    occupation_histogram,
    one,
    path_statistics,
    positive_part_capped,
    running_sup,
    sample_path,
    sample_paths,
    sign_change_count,
    sign_change_witness,
)
from app.core.rmt import MatrixPath
from app.core.zeta import log_zeta_horizontal, selberg_log_sum


def _path(grid, y, T=1e6):
    grid = np.asarray(grid, dtype=np.float64)
    return ProcessPath(
        T=T,
        tau=T,
        alpha_grid=grid,
        values=np.asarray(y, dtype=np.float64) + 0j,
        model="direct",
        normalization=normalization(T),
    )


@pytest.fixture
def unit_grid():
    return np.linspace(0.0, 1.0, 1001)


def test_every_path_type_is_a_trajectory():
    """Test that zeta, Brownian and matrix paths satisfy the protocol."""
    grid = np.array([0.0, 1.0])
    values = np.zeros(2, dtype=np.complex128)
    assert isinstance(_path(grid, [0.0, 0.0]), Trajectory)
    assert isinstance(BrownianPath(alpha_grid=grid, values=values), Trajectory)
    assert isinstance(MatrixPath(n=2, alpha_grid=grid, values=values, normalization=1.0), Trajectory)


def test_arcsine_statistic_uses_linear_crossings(unit_grid):
    """Test the nonnegative fraction of a line through 1/2."""
    path = _path(unit_grid, unit_grid - 0.5)
    assert arcsine_statistic(path) == pytest.approx(0.5)
    assert negative_measure(path) == pytest.approx(0.5)
    assert arcsine_statistic(_path([0.0, 1.0], [-1.0, 3.0])) == pytest.approx(0.75)


def test_arcsine_statistic_restricts_to_unit_interval():
    """Test that grid points beyond alpha = 1 are ignored."""
    path = _path([0.0, 0.5, 1.0, 2.0], [1.0, 1.0, 1.0, -5.0])
    assert arcsine_statistic(path) == 1.0
    assert arcsine_statistic(path, component="imag") == 1.0


def test_max_statistic_cap():
    """Test the default cap of a zeta path and an explicit cap."""
    path = _path([0.0, 1.0], [-2.0, -1.0])
    assert path.cap == pytest.approx(math.log(2.612375348685488) / normalization(1e6))
    assert max_statistic(path) == pytest.approx(path.cap)
    assert max_statistic(path, cap=-math.inf) == -1.0


def test_sign_change_count_ignores_zero_touches():
    """Test that only strictly opposite neighbours count."""
    assert sign_change_count(_path(np.arange(5.0), [1.0, -1.0, 1.0, 0.0, -1.0])) == 2


def test_running_sup():
    """Test the running maximum of the modulus of one component."""
    sup = running_sup(_path(np.arange(4.0), [0.0, -2.0, 1.0, 3.0]))
    assert sup.tolist() == [0.0, 2.0, 2.0, 3.0]


def test_occupation_functional(unit_grid):
    """Test phi = 1, a capped positive part and the horizon check."""
    path = _path(unit_grid, 2 * unit_grid)
    assert occupation_functional(path, one, 0.3) == pytest.approx(0.3)
    assert occupation_functional(path, positive_part_capped, 1.0) == pytest.approx(0.75)
    with pytest.raises(DomainError):
        occupation_functional(path, one, 1.5)
    with pytest.raises(DomainError):
        occupation_functional(path, one, -0.1)


def test_sign_change_witness(unit_grid):
    """Test that the witness needs both signs before the horizon."""
    path = _path(unit_grid, unit_grid - 0.5)
    assert sign_change_witness(path, 1.0)
    assert not sign_change_witness(path, 0.4)


def test_occupation_histogram_masses_add_up(unit_grid):
    """Test that the binned occupation measure has total mass t."""
    edges, mass = occupation_histogram(_path(unit_grid, np.sin(6 * unit_grid)), 0.8)
    assert mass.sum() == pytest.approx(0.8)
    assert edges.size == mass.size + 1


def test_log_measure_statistic_extremes():
    """Test an everywhere-positive and an everywhere-negative path."""
    grid = np.linspace(0.0, 1.0, 50)
    assert log_measure_statistic(_path(grid, np.ones(50))) == pytest.approx(1.0)
    assert log_measure_statistic(_path(grid, -np.ones(50))) == pytest.approx(0.0)


def test_log_measure_matches_arcsine_statistic(unit_grid):
    """Test that the sigma-measure is the alpha-fraction after the change of variables."""
    path = _path(unit_grid, np.sin(5 * unit_grid) - 0.3)
    assert log_measure_statistic(path) == pytest.approx(arcsine_statistic(path), abs=1e-3)


def test_evaluate_statistic_dispatch(unit_grid):
    """Test the named statistics against the direct functionals."""
    path = _path(unit_grid, np.cos(9 * unit_grid))
    assert evaluate_statistic(StatisticSpec("arcsine"), path) == arcsine_statistic(path)
    assert evaluate_statistic(StatisticSpec("max_with_cap", cap=0.0), path) == 1.0
    occupation = StatisticSpec("occupation", phi="positive_part_capped", t=0.5)
    assert evaluate_statistic(occupation, path) == pytest.approx(
        occupation_functional(path, positive_part_capped, 0.5)
    )
    # cos(9 alpha) changes sign at pi/18 and 3 pi/18 only before alpha = 0.6
    assert evaluate_statistic(StatisticSpec("sign_changes", t=0.6), path) == 2.0
    assert evaluate_statistic(StatisticSpec("running_sup", alpha=0.0), path) == 1.0


def test_path_statistics_bundle(unit_grid):
    """Test the combined per-path summary."""
    stats = path_statistics(_path(unit_grid, unit_grid - 0.5))
    assert stats.arcsine_measure == pytest.approx(0.5)
    assert stats.sign_changes == 0
    assert stats.running_sup[-1] == pytest.approx(0.5)


def test_sample_path_direct_starts_at_three_halves():
    """Test that alpha = 0 is log zeta(3/2 + i tau) scaled by sqrt(log log T)."""
    config = RunConfig(T=1e3, model="direct", grid_points=5)
    path = sample_path(config, 1500.0, ModelTables())
    assert path.sigmas[0] == pytest.approx(1.5)
    expected = log_zeta_horizontal(1500.0, 1.5) / normalization(1e3)
    assert path.values[0] == pytest.approx(expected, abs=1e-9)
    assert path.values.size == 5


def test_sample_paths_prime_sum_matches_direct_sum():
    """Test the prime-sum model against a plain sum over primes up to T."""
    config = RunConfig(T=1e3, model="prime_sum", grid_points=3)
    table = sieve(1000)
    paths = sample_paths(config, [1200.0, 1800.0], ModelTables(primes=table))
    primes = table.primes.astype(np.float64)
    for path in paths:
        sigma = path.sigmas[1]
        expected = np.sum(primes ** complex(-sigma, -path.tau)) / normalization(1e3)
        assert path.values[1] == pytest.approx(expected, abs=1e-9)
        assert path.model == "prime_sum"


def test_sample_paths_selberg_matches_scalar_sum():
    """Test the mollified model against the scalar mollified sum."""
    config = RunConfig(T=1e3, model="selberg_mollified", grid_points=4, x_exponent=1 / 6)
    mollifier = build_mollifier(config.x)
    path = sample_path(config, 1000.0, ModelTables(mollifier=mollifier))
    expected = selberg_log_sum(float(path.sigmas[2]), 1000.0, mollifier) / normalization(1e3)
    assert path.values[2] == pytest.approx(expected, abs=1e-12)


def test_sample_paths_errors():
    """Test heights below 2 and missing arithmetic tables."""
    config = RunConfig(T=1e3, model="prime_sum", grid_points=3)
    with pytest.raises(DomainError):
        sample_paths(config, [1.0], ModelTables(primes=sieve(1000)))
    with pytest.raises(CapacityError):
        sample_paths(config, [1200.0], ModelTables())
    with pytest.raises(CapacityError):
        sample_paths(config, [1200.0], ModelTables(primes=sieve(100)))
    mollified = RunConfig(T=1e3, model="selberg_mollified", grid_points=3, x_exponent=1 / 6)
    with pytest.raises(CapacityError):
        sample_paths(mollified, [1200.0], ModelTables())


def test_direct_and_prime_sum_paths_stay_close():
    """Test the mean sup-norm gap between the two models at the same heights."""
    T = 1e3
    grid = 9
    taus = np.random.default_rng(3).uniform(T, 2 * T, 8).tolist()
    direct = sample_paths(RunConfig(T=T, model="direct", grid_points=grid), taus, ModelTables())
    prime_sum = sample_paths(
        RunConfig(T=T, model="prime_sum", grid_points=grid), taus, ModelTables(primes=sieve(1000))
    )
    gaps = [np.abs(a.values - b.values).max() for a, b in zip(direct, prime_sum, strict=True)]
    assert np.mean(gaps) <= 3 / math.sqrt(math.log(math.log(T)))
