"""Simulated standard complex Brownian motion and analytic reference laws."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import erf

from app.core.errors import DomainError
from app.core.process import StatisticSpec, evaluate_statistic
from app.core.random_streams import SeedLike, Stream, make_rng

logger = logging.getLogger(__name__)

# Paths simulated per generator stream in batch sampling
PATH_CHUNK = 1000


@dataclass(frozen=True)
class BrownianPath:
    """``B = (B1 + i B2)/sqrt(2)`` on an alpha grid, ``B(0) = 0``.

    ``cap`` is 0 so that ``max_statistic`` with its default cap reads the capped
    maximum of the limit object.
    """

    alpha_grid: NDArray[np.float64]
    values: NDArray[np.complex128]
    cap: float = 0.0


def _check_grid(alpha_grid: ArrayLike) -> NDArray[np.float64]:
    grid = np.asarray(alpha_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0:
        msg = "Brownian grid must be one-dimensional and start at 0"
        raise DomainError(msg)
    if np.any(np.diff(grid) <= 0):
        msg = "Brownian grid must be strictly increasing"
        raise DomainError(msg)
    return grid


def _simulate(
    grid: NDArray[np.float64], n_paths: int, rng: np.random.Generator
) -> NDArray[np.complex128]:
    scale = np.sqrt(np.diff(grid) / 2)
    real = rng.standard_normal((n_paths, scale.size)) * scale
    imag = rng.standard_normal((n_paths, scale.size)) * scale
    values = np.zeros((n_paths, grid.size), dtype=np.complex128)
    values[:, 1:] = np.cumsum(real + 1j * imag, axis=1)
    return values


def simulate_bm(alpha_grid: ArrayLike, seed: SeedLike) -> BrownianPath:
    """One complex Brownian path; each component increment has variance ``d alpha / 2``."""
    grid = _check_grid(alpha_grid)
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed, Stream.BROWNIAN)
    return BrownianPath(alpha_grid=grid, values=_simulate(grid, 1, rng)[0])


def simulate_bm_batch(
    alpha_grid: ArrayLike, n_paths: int, seed: int | Sequence[int]
) -> list[BrownianPath]:
    """``n_paths`` independent paths; chunk ``k`` draws from stream ``(seed, BROWNIAN, k)``."""
    grid = _check_grid(alpha_grid)
    paths: list[BrownianPath] = []
    for chunk, start in enumerate(range(0, n_paths, PATH_CHUNK)):
        count = min(PATH_CHUNK, n_paths - start)
        values = _simulate(grid, count, make_rng(seed, Stream.BROWNIAN, chunk))
        paths.extend(BrownianPath(alpha_grid=grid, values=row) for row in values)
    return paths


def half_normal_cdf(u: ArrayLike) -> NDArray[np.float64] | float:
    """``1 - 2 P(N(0,1) > u)`` for ``u >= 0``, zero below."""
    x = np.asarray(u, dtype=np.float64)
    result = np.where(x >= 0, erf(np.maximum(x, 0.0) / math.sqrt(2)), 0.0)
    return float(result) if result.ndim == 0 else result


def arcsine_cdf(y: ArrayLike) -> NDArray[np.float64] | float:
    """``(2/pi) arcsin(sqrt(y))`` on ``[0, 1]``.

    Raises:
        DomainError: for any ``y`` outside ``[0, 1]``
    """
    x = np.asarray(y, dtype=np.float64)
    if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
        msg = f"arcsine law is supported on [0, 1], got {y}"
        raise DomainError(msg)
    result = 2 / np.pi * np.arcsin(np.sqrt(x))
    return float(result) if result.ndim == 0 else result


def bm_statistic_sample(
    statistic: StatisticSpec, n_paths: int, alpha_grid: ArrayLike, seed: int | Sequence[int]
) -> NDArray[np.float64]:
    """``n_paths`` draws of ``statistic`` on simulated Brownian paths.

    Statistics are evaluated with the same functionals used on zeta paths.
    """
    paths = simulate_bm_batch(alpha_grid, n_paths, seed)
    logger.debug("Evaluating %s on %d Brownian paths", statistic.kind, n_paths)
    return np.array([evaluate_statistic(statistic, path) for path in paths], dtype=np.float64)
