"""Haar unitary sampling and the characteristic-polynomial analogue of the log-zeta process."""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from app.core.errors import DomainError, NearZeroError, ZetaLabError
from app.core.random_streams import SeedLike, Stream, make_rng

logger = logging.getLogger(__name__)

MAX_DIMENSION = 4096
MAX_RETRIES = 8
FACTOR_THRESHOLD = 1e-14


@dataclass(frozen=True)
class UnitarySample:
    """Eigenangles of one Haar unitary, sorted ascending in ``[0, 2 pi)``."""

    n: int
    eigenangles: NDArray[np.float64]
    retries: int = 0

    @property
    def eigenvalues(self) -> NDArray[np.complex128]:
        return np.exp(1j * self.eigenangles)

    def rotated(self, c: float) -> "UnitarySample":
        """The same spectrum rotated by ``c`` modulo ``2 pi``."""
        angles = np.sort(np.mod(self.eigenangles + c, 2 * np.pi))
        return UnitarySample(n=self.n, eigenangles=np.minimum(angles, np.nextafter(2 * np.pi, 0)))


@dataclass(frozen=True)
class MatrixPath:
    """``alpha -> (1/sqrt(log n)) log det(exp(n^-alpha) I - U)`` on a grid."""

    n: int
    alpha_grid: NDArray[np.float64]
    values: NDArray[np.complex128]
    normalization: float
    cap: float = 0.0


def haar_unitary_matrix(n: int, rng: np.random.Generator) -> NDArray[np.complex128]:
    """QR of a complex Ginibre matrix with the phases of ``diag(R)`` moved into ``Q``."""
    ginibre = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = scipy.linalg.qr(ginibre)
    d = np.diagonal(r)
    return np.asarray(q * (d / np.abs(d)), dtype=np.complex128)


def sample_haar_unitary(n: int, seed: SeedLike, index: int = 0) -> UnitarySample:
    """Eigenangles of a Haar-distributed ``n x n`` unitary.

    A draw whose eigen-solver does not converge is replaced by a fresh draw from the
    same stream; the number of replacements is recorded on the sample.

    Raises:
        DomainError: unless ``1 <= n <= 4096``
    """
    if not 1 <= n <= MAX_DIMENSION:
        msg = f"dimension must lie in [1, {MAX_DIMENSION}], got {n}"
        raise DomainError(msg)
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed, Stream.HAAR, index)
    for retries in range(MAX_RETRIES):
        u = haar_unitary_matrix(n, rng)
        try:
            eigenvalues = scipy.linalg.eigvals(u)
        except np.linalg.LinAlgError:
            logger.warning("Eigen-solver failed for n=%d, redrawing", n)
            continue
        angles = np.mod(np.angle(eigenvalues), 2 * np.pi)
        angles = np.minimum(angles, np.nextafter(2 * np.pi, 0))
        return UnitarySample(n=n, eigenangles=np.sort(angles), retries=retries)
    msg = f"eigen-solver failed {MAX_RETRIES} times for n={n}"
    raise ZetaLabError(msg)


def _log_factors(angles: NDArray[np.float64], r: NDArray[np.float64]) -> NDArray[np.complex128]:
    """``log(e^r - e^{i theta})`` for every (r, theta) pair, shape ``(len(r), len(angles))``.

    ``Re(e^r - e^{i theta}) = expm1(r) + 2 sin^2(theta/2) > 0`` for ``r > 0``, so the
    principal branch is continuous in alpha.
    """
    rr = r[:, None]
    real = np.expm1(rr) + 2 * np.sin(angles / 2) ** 2
    imag = np.broadcast_to(-np.sin(angles), real.shape)
    modulus = np.hypot(real, imag)
    if modulus.min(initial=np.inf) < FACTOR_THRESHOLD:
        row, col = np.unravel_index(int(np.argmin(modulus)), modulus.shape)
        raise NearZeroError(float(r[row]), float(angles[col]), float(modulus[row, col]))
    return np.log(modulus) + 1j * np.arctan2(imag, real)


def unnormalized_log_det(sample: UnitarySample, alpha_grid: ArrayLike) -> NDArray[np.complex128]:
    """``sum_j log(e^(n^-alpha) - e^{i theta_j})`` per grid point; valid for ``n = 1``."""
    grid = np.asarray(alpha_grid, dtype=np.float64)
    r = float(sample.n) ** (-grid)
    return _log_factors(sample.eigenangles, r).sum(axis=1)


def rmt_path(
    sample: UnitarySample, alpha_grid: ArrayLike, drift_free: bool = False
) -> MatrixPath:
    """Normalized log characteristic polynomial along the grid.

    With ``drift_free`` the deterministic real drift ``n^(1 - alpha)`` of the sum is
    removed before normalizing.

    Raises:
        DomainError: for ``n < 2``
        NearZeroError: when a factor falls below ``1e-14`` in modulus
    """
    if sample.n < 2:
        msg = "the normalization 1/sqrt(log n) needs n >= 2"
        raise DomainError(msg)
    grid = np.asarray(alpha_grid, dtype=np.float64)
    raw = unnormalized_log_det(sample, grid)
    if drift_free:
        raw = raw - float(sample.n) ** (1 - grid)
    scale = math.sqrt(math.log(sample.n))
    return MatrixPath(n=sample.n, alpha_grid=grid, values=raw / scale, normalization=scale)


def dense_log_det(u: NDArray[np.complex128], alpha: float) -> complex:
    """``log det(exp(n^-alpha) I - U)`` from the dense matrix (principal log of the determinant)."""
    n = u.shape[0]
    sign, logabs = np.linalg.slogdet(math.exp(float(n) ** (-alpha)) * np.eye(n) - u)
    return complex(logabs + 1j * np.angle(sign))
