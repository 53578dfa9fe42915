"""Reproducible sampling of zeta, Brownian and random-matrix trajectories in fixed batches.

Sample ``i`` always draws its height from stream ``(seed, TAU, i)`` (its matrix from
``(seed, HAAR, i)``), and batches have a fixed size, so results do not depend on the
number of worker processes.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from app.config import RunConfig, get_settings
from app.core.arith import PrimeTable, build_mollifier, sieve
from app.core.errors import NearZeroError, ZetaLabError
from app.core.oracle import simulate_bm_batch
from app.core.process import ModelTables, ProcessPath, Trajectory, sample_paths
from app.core.random_streams import Stream, make_rng
from app.core.rmt import MatrixPath, rmt_path, sample_haar_unitary
from app.core.zeta import DirichletModelConfig
from app.services.prime_cache import PrimeCache
from app.services.runner import run_tasks

logger = logging.getLogger(__name__)

MAX_RESAMPLES = 100

# Tables of the current process, keyed by the config fields they depend on
_TABLES: tuple[tuple[object, ...], ModelTables] | None = None


def prime_table(limit: int) -> PrimeTable:
    """Primes up to ``limit``, through the on-disk cache when ``ZB_CACHE_DIR`` is set."""
    cache_dir = get_settings().CACHE_DIR
    if cache_dir is None:
        return sieve(limit)
    return PrimeCache(cache_dir).get_or_build(limit)


def tables_for(config: RunConfig) -> ModelTables:
    """Arithmetic tables the configured model needs."""
    if config.model == "prime_sum":
        cutoff = DirichletModelConfig.for_height("prime_sum", config.T, config.x_exponent).cutoff
        return ModelTables(primes=prime_table(math.floor(cutoff)))
    if config.model == "selberg_mollified":
        x = config.x
        table = prime_table(math.floor(x**3))
        return ModelTables(
            primes=table,
            mollifier=build_mollifier(x, table, config.mollifier_normalization),
        )
    return ModelTables()


def _table_key(config: RunConfig) -> tuple[object, ...]:
    return (config.model, config.T, config.x_exponent, config.mollifier_normalization)


def init_worker(config: RunConfig) -> None:
    global _TABLES
    _TABLES = (_table_key(config), tables_for(config))
    logger.debug("Worker tables ready for model %s", config.model)


def current_tables(config: RunConfig) -> ModelTables:
    if _TABLES is None or _TABLES[0] != _table_key(config):
        init_worker(config)
    assert _TABLES is not None
    return _TABLES[1]


@dataclass(frozen=True)
class SampleBatch:
    """Samples ``start .. start + count - 1`` of a run on a fixed grid."""

    config: RunConfig
    start: int
    count: int
    alpha_grid: tuple[float, ...]


@dataclass(frozen=True)
class BatchResult:
    paths: list[ProcessPath]
    resamples: int


def _draw(rng: np.random.Generator, config: RunConfig) -> float:
    low, high = config.tau_bounds()
    return float(rng.uniform(low, high))


def sample_batch(batch: SampleBatch) -> BatchResult:
    """Sample one batch of zeta-side paths with the tables of the current process."""
    config = batch.config
    tables = current_tables(config)
    grid = np.array(batch.alpha_grid)
    sample_ids = range(batch.start, batch.start + batch.count)
    rngs = [make_rng(config.seed, Stream.TAU, i) for i in sample_ids]
    taus = [_draw(rng, config) for rng in rngs]

    if config.model != "direct":
        return BatchResult(paths=sample_paths(config, taus, tables, grid), resamples=0)

    paths: list[ProcessPath] = []
    resamples = 0
    for sample_id, rng, tau in zip(sample_ids, rngs, taus, strict=True):
        for _ in range(MAX_RESAMPLES):
            try:
                paths.extend(sample_paths(config, [tau], tables, grid))
                break
            except NearZeroError as e:
                resamples += 1
                logger.warning("Resampling height for sample %d: %s", sample_id, e)
                tau = _draw(rng, config)
        else:
            msg = f"sample {sample_id} hit {MAX_RESAMPLES} near-zero heights in a row"
            raise ZetaLabError(msg)
    return BatchResult(paths=paths, resamples=resamples)


def batches(config: RunConfig, n: int, alpha_grid: NDArray[np.float64]) -> list[SampleBatch]:
    grid = tuple(float(a) for a in alpha_grid)
    return [
        SampleBatch(config, start, min(config.batch_size, n - start), grid)
        for start in range(0, n, config.batch_size)
    ]


def sample_zeta_paths(
    config: RunConfig, n: int, alpha_grid: NDArray[np.float64] | None = None
) -> tuple[list[ProcessPath], int]:
    """``n`` zeta-side paths under ``config`` and the number of near-zero resamples."""
    grid = config.alpha_grid() if alpha_grid is None else alpha_grid
    results = run_tasks(
        sample_batch,
        batches(config, n, grid),
        workers=config.workers,
        initializer=init_worker,
        initargs=(config,),
    )
    paths = [path for result in results for path in result.paths]
    resamples = sum(result.resamples for result in results)
    logger.info(
        "Sampled %d %s paths at T=%s (%d resamples)", len(paths), config.model, config.T, resamples
    )
    return paths, resamples


def sample_subject_paths(
    config: RunConfig, n: int, alpha_grid: NDArray[np.float64]
) -> tuple[Sequence[Trajectory], int]:
    """Zeta paths, or Brownian paths from a separate stream when ``subject`` is ``oracle``."""
    if config.subject == "oracle":
        return simulate_bm_batch(alpha_grid, n, (config.seed, Stream.SUITE)), 0
    return sample_zeta_paths(config, n, alpha_grid)


@dataclass(frozen=True)
class MatrixBatch:
    config: RunConfig
    start: int
    count: int
    alpha_grid: tuple[float, ...]
    drift_free: bool


@dataclass(frozen=True)
class MatrixBatchResult:
    paths: list[MatrixPath]
    resamples: int


def sample_matrix_batch(batch: MatrixBatch) -> MatrixBatchResult:
    config = batch.config
    grid = np.array(batch.alpha_grid)
    paths: list[MatrixPath] = []
    resamples = 0
    for sample_id in range(batch.start, batch.start + batch.count):
        rng = make_rng(config.seed, Stream.HAAR, sample_id)
        for _ in range(MAX_RESAMPLES):
            try:
                sample = sample_haar_unitary(config.rmt_dimension, rng)
                paths.append(rmt_path(sample, grid, drift_free=batch.drift_free))
                resamples += sample.retries
                break
            except NearZeroError as e:
                resamples += 1
                logger.warning("Redrawing matrix for sample %d: %s", sample_id, e)
        else:
            msg = f"matrix sample {sample_id} failed {MAX_RESAMPLES} times"
            raise ZetaLabError(msg)
    return MatrixBatchResult(paths=paths, resamples=resamples)


def sample_matrix_paths(
    config: RunConfig, n: int, alpha_grid: NDArray[np.float64], drift_free: bool = True
) -> tuple[list[MatrixPath], int]:
    """``n`` characteristic-polynomial paths of dimension ``config.rmt_dimension``."""
    grid = tuple(float(a) for a in alpha_grid)
    tasks = [
        MatrixBatch(config, start, min(config.batch_size, n - start), grid, drift_free)
        for start in range(0, n, config.batch_size)
    ]
    results = run_tasks(sample_matrix_batch, tasks, workers=config.workers)
    paths = [path for result in results for path in result.paths]
    return paths, sum(result.resamples for result in results)
