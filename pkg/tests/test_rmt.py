"""Tests for Haar unitary sampling and the characteristic-polynomial paths."""

import math

import numpy as np
import pytest
from scipy import stats

from app.core.errors import DomainError, NearZeroError
from app.core.random_streams import Stream, make_rng
from app.core.rmt import (
    UnitarySample,
    dense_log_det,
    haar_unitary_matrix,
    rmt_path,
    sample_haar_unitary,
    unnormalized_log_det,
)


def test_one_dimensional_angles_are_uniform():
    """Test that U(1) angles follow the uniform law on [0, 2 pi)."""
    angles = np.array([sample_haar_unitary(1, 3, index=k).eigenangles[0] for k in range(5000)])
    assert stats.kstest(angles / (2 * math.pi), "uniform").statistic <= 0.03


def test_haar_matrix_is_unitary():
    """Test U U* = I to 1e-12."""
    u = haar_unitary_matrix(64, make_rng(1, Stream.HAAR))
    assert np.abs(u @ u.conj().T - np.eye(64)).max() <= 1e-12


def test_sample_is_sorted_on_the_circle():
    """Test the eigenangle range, order and mean spacing."""
    sample = sample_haar_unitary(128, 5)
    angles = sample.eigenangles
    assert angles.size == 128
    assert np.all((angles >= 0) & (angles < 2 * math.pi))
    assert np.all(np.diff(angles) >= 0)
    assert sample.retries == 0
    assert np.mean(np.diff(np.append(angles, angles[0] + 2 * math.pi))) == pytest.approx(
        2 * math.pi / 128
    )


def test_sample_is_reproducible_per_index():
    """Test that (seed, index) fixes the draw."""
    first = sample_haar_unitary(8, 42, index=2).eigenangles
    assert np.array_equal(first, sample_haar_unitary(8, 42, index=2).eigenangles)
    assert not np.array_equal(first, sample_haar_unitary(8, 42, index=3).eigenangles)


def test_dimension_bounds():
    """Test the accepted dimension range."""
    with pytest.raises(DomainError):
        sample_haar_unitary(0, 1)
    with pytest.raises(DomainError):
        sample_haar_unitary(4097, 1)


def test_log_det_matches_dense_determinant():
    """Test the eigenvalue sum against slogdet of the matrix itself."""
    u = haar_unitary_matrix(16, make_rng(7, Stream.HAAR))
    angles = np.sort(np.mod(np.angle(np.linalg.eigvals(u)), 2 * math.pi))
    sample = UnitarySample(n=16, eigenangles=angles)
    for alpha in (0.0, 0.5, 1.0):
        summed = unnormalized_log_det(sample, [alpha])[0]
        dense = dense_log_det(u, alpha)
        assert abs(summed.real - dense.real) <= 1e-8 * max(1.0, abs(dense.real))
        phase = np.angle(np.exp(1j * (summed.imag - dense.imag)))
        assert abs(phase) <= 1e-8


def test_real_part_lower_bound_at_alpha_zero():
    """Test Re log det >= n log(e - 1) at alpha = 0."""
    sample = sample_haar_unitary(32, 9)
    assert unnormalized_log_det(sample, [0.0])[0].real >= 32 * math.log(math.e - 1) - 1e-9


def test_one_dimensional_closed_form():
    """Test log(e - e^{i theta}) for n = 1."""
    theta = 2.0
    sample = UnitarySample(n=1, eigenangles=np.array([theta]))
    expected = complex(np.log(math.e - np.exp(1j * theta)))
    assert unnormalized_log_det(sample, [0.0])[0] == pytest.approx(expected)


def test_rmt_path_normalization_and_drift():
    """Test the 1/sqrt(log n) scaling and the removed real drift."""
    sample = sample_haar_unitary(64, 11)
    grid = np.linspace(0.0, 1.0, 9)
    plain = rmt_path(sample, grid)
    centered = rmt_path(sample, grid, drift_free=True)
    scale = math.sqrt(math.log(64))
    assert plain.normalization == pytest.approx(scale)
    assert np.allclose(plain.values * scale, unnormalized_log_det(sample, grid))
    assert np.allclose((plain.values - centered.values) * scale, 64.0 ** (1 - grid))
    with pytest.raises(DomainError):
        rmt_path(UnitarySample(n=1, eigenangles=np.array([0.5])), grid)


def test_factor_near_zero_is_signalled():
    """Test the resample signal when an eigenvalue sits on the evaluation radius."""
    sample = UnitarySample(n=2, eigenangles=np.array([0.0, math.pi]))
    with pytest.raises(NearZeroError):
        unnormalized_log_det(sample, [60.0])


def test_rotation_leaves_the_law_unchanged():
    """Test that rotating spectra by a constant does not move Re log det in law."""
    grid = [0.5]
    plain = []
    rotated = []
    for k in range(400):
        sample = sample_haar_unitary(16, 13, index=k)
        plain.append(unnormalized_log_det(sample, grid)[0].real)
        rotated.append(unnormalized_log_det(sample_haar_unitary(16, 14, index=k).rotated(1.3), grid)[0].real)
    assert stats.ks_2samp(plain, rotated).statistic <= 0.15
