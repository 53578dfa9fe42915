"""Tests for the Brownian oracle and the analytic reference laws."""

import math

import numpy as np
import pytest

from app.core.errors import DomainError
from app.core.oracle import (
    arcsine_cdf,
    bm_statistic_sample,
    half_normal_cdf,
    simulate_bm,
    simulate_bm_batch,
)
from app.core.process import (
    StatisticSpec,
    arcsine_statistic,
    max_statistic,
    occupation_functional,
    one,
)
from app.core.random_streams import Stream, make_rng
from app.core.stats import EmpiricalDistribution, ks_one_sample


@pytest.fixture(scope="module")
def coarse_paths():
    """A large batch on a short grid for moment checks."""
    grid = np.array([0.0, 0.25, 0.5, 1.0])
    values = np.array([path.values for path in simulate_bm_batch(grid, 100_000, 11)])
    return grid, values


def test_paths_start_at_zero():
    """Test B(0) = 0."""
    path = simulate_bm(np.linspace(0.0, 1.0, 17), 3)
    assert path.values[0] == 0
    assert path.cap == 0.0


def test_simulate_bm_is_reproducible():
    """Test that a seed fixes the path and a generator is used as given."""
    grid = np.linspace(0.0, 1.0, 33)
    assert np.array_equal(simulate_bm(grid, 5).values, simulate_bm(grid, 5).values)
    from_rng = simulate_bm(grid, make_rng(5, Stream.BROWNIAN))
    assert np.array_equal(from_rng.values, simulate_bm(grid, 5).values)


def test_component_variances(coarse_paths):
    """Test Var Re B(t) = Var Im B(t) = t/2 and E|B(t)|^2 = t."""
    grid, values = coarse_paths
    for k, t in enumerate(grid[1:], start=1):
        assert np.var(values[:, k].real) == pytest.approx(t / 2, rel=0.03)
        assert np.var(values[:, k].imag) == pytest.approx(t / 2, rel=0.03)
        assert np.mean(np.abs(values[:, k]) ** 2) == pytest.approx(t, rel=0.03)


def test_covariance_is_min(coarse_paths):
    """Test E[B(s) conj B(t)] = min(s, t) with a vanishing imaginary part."""
    grid, values = coarse_paths
    cross = np.mean(values[:, 1] * np.conj(values[:, 3]))
    assert cross.real == pytest.approx(grid[1], abs=0.01)
    assert abs(cross.imag) < 0.01


def test_increments_are_uncorrelated(coarse_paths):
    """Test that disjoint increments have correlation near 0."""
    _, values = coarse_paths
    first = values[:, 1].real
    second = (values[:, 3] - values[:, 2]).real
    assert abs(np.corrcoef(first, second)[0, 1]) < 0.02


def test_bad_grids_are_rejected():
    """Test the grid checks."""
    with pytest.raises(DomainError):
        simulate_bm([0.5, 1.0], 1)
    with pytest.raises(DomainError):
        simulate_bm([0.0, 0.5, 0.5], 1)
    with pytest.raises(DomainError):
        simulate_bm([0.0], 1)


def test_half_normal_cdf_values():
    """Test P(|N| <= 1) and the zero region."""
    assert half_normal_cdf(1.0) == pytest.approx(0.6826894921370859, abs=1e-12)
    assert half_normal_cdf(-0.5) == 0.0
    assert half_normal_cdf(np.array([0.0, 2.0])).tolist() == pytest.approx([0.0, math.erf(2 / math.sqrt(2))])


def test_arcsine_cdf_values():
    """Test the arcsine law at 1/4, the endpoints and outside its support."""
    assert arcsine_cdf(0.25) == pytest.approx(1 / 3)
    assert arcsine_cdf(0.0) == 0.0
    assert arcsine_cdf(1.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        arcsine_cdf(1.5)
    with pytest.raises(DomainError):
        arcsine_cdf(math.nan)


def test_occupation_with_one_is_the_horizon():
    """Test integral_0^t 1 du = t on a Brownian path."""
    path = simulate_bm(np.linspace(0.0, 1.0, 257), 9)
    assert occupation_functional(path, one, 0.7) == pytest.approx(0.7)


def test_arcsine_law_of_simulated_paths():
    """Test the positive-time fraction against the arcsine law."""
    samples = bm_statistic_sample(StatisticSpec("arcsine"), 2000, np.linspace(0.0, 1.0, 1025), 13)
    ks = ks_one_sample(EmpiricalDistribution.from_samples(samples), arcsine_cdf)
    assert ks <= 0.05


def test_reflection_law_of_simulated_paths():
    """Test sqrt(2) max Re B on [0, 1] against the half-normal law."""
    spec = StatisticSpec("max_with_cap", cap=-math.inf)
    samples = math.sqrt(2) * bm_statistic_sample(spec, 2000, np.linspace(0.0, 1.0, 2049), 17)
    ks = ks_one_sample(EmpiricalDistribution.from_samples(samples), half_normal_cdf)
    assert ks <= 0.06


def test_batch_statistics_use_the_shared_functionals():
    """Test that the oracle sample equals the functionals applied path by path."""
    grid = np.linspace(0.0, 1.0, 65)
    paths = simulate_bm_batch(grid, 10, 21)
    maxima = bm_statistic_sample(StatisticSpec("max_with_cap"), 10, grid, 21)
    fractions = bm_statistic_sample(StatisticSpec("arcsine"), 10, grid, 21)
    assert maxima.tolist() == [max_statistic(path) for path in paths]
    assert fractions.tolist() == [arcsine_statistic(path) for path in paths]


def test_running_sup_has_iterated_log_size_near_zero():
    """Test running_sup(alpha) / sqrt(alpha log log(1/alpha)) at alpha = 1e-3."""
    alpha = 1e-3
    spec = StatisticSpec("running_sup", alpha=alpha)
    samples = bm_statistic_sample(spec, 1000, np.linspace(0.0, alpha, 201), 23)
    ratios = samples / math.sqrt(alpha * math.log(math.log(1 / alpha)))
    assert np.mean((ratios >= 0.2) & (ratios <= 3.0)) >= 0.9
