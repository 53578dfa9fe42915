"""Distributional experiments: the subject process against the Brownian oracle and reference laws."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.stats import norm

from app.config import RunConfig
from app.core.errors import DomainError, NearZeroError, ZetaLabError
from app.core.oracle import arcsine_cdf, bm_statistic_sample, half_normal_cdf
from app.core.process import (
    StatisticSpec,
    Trajectory,
    evaluate_statistic,
    sign_change_witness,
)
from app.core.random_streams import Stream, make_rng
from app.core.stats import (
    EmpiricalDistribution,
    complex_covariance,
    ks_one_sample,
    ks_two_sample,
)
from app.core.zeta import dirichlet_prime_sum, log_zeta_horizontal
from app.experiments.base import Outcome, new_result
from app.experiments.sampling import (
    MAX_RESAMPLES,
    current_tables,
    sample_matrix_paths,
    sample_subject_paths,
)
from app.services.runner import run_tasks
from app.services.svg import ecdf_svg, heatmap_svg

logger = logging.getLogger(__name__)

COVARIANCE_ALPHAS = (0.25, 0.5, 0.75, 1.0)
PROXIMITY_HEIGHT_FACTOR = 10.0


def _require_samples(config: RunConfig) -> int:
    if config.n_samples < 2:
        msg = f"distributional experiments need at least 2 samples, got {config.n_samples}"
        raise DomainError(msg)
    return config.n_samples


def unit_grid(points: int) -> NDArray[np.float64]:
    return np.linspace(0.0, 1.0, points)


def _statistic(spec: StatisticSpec, paths: Sequence[Trajectory]) -> NDArray[np.float64]:
    return np.array([evaluate_statistic(spec, path) for path in paths], dtype=np.float64)


def _ecdf(samples: NDArray[np.float64]) -> EmpiricalDistribution:
    return EmpiricalDistribution.from_samples(samples)


def clt(config: RunConfig) -> Outcome:
    """``Z(1)`` against the standard complex Gaussian (each component ``N(0, 1/2)``)."""
    n = _require_samples(config)
    result = new_result("clt")
    paths, result.resamples = sample_subject_paths(config, n, np.array([0.0, 1.0]))
    values = np.array([path.values[-1] for path in paths])
    reference = norm(scale=math.sqrt(0.5)).cdf
    ks_real = ks_one_sample(_ecdf(values.real), reference)
    ks_imag = ks_one_sample(_ecdf(values.imag), reference)
    result.statistics = {
        "ks_real": ks_real,
        "ks_imag": ks_imag,
        "mean_square_modulus": float(np.mean(np.abs(values) ** 2)),
        "n_samples": n,
    }
    result.checks = {
        "ks_real": ks_real <= result.thresholds["ks_real"],
        "ks_imag": ks_imag <= result.thresholds["ks_imag"],
    }
    outcome = Outcome(result, samples={"re_z1": values.real, "im_z1": values.imag})
    if config.plot:
        outcome.plots["clt"] = ecdf_svg({"Re Z(1)": values.real}, reference, title="clt")
    return outcome


def _covariance_outcome(
    name: str, values: NDArray[np.complex128], alphas: Sequence[float], plot: bool
) -> Outcome:
    result = new_result(name)
    estimate = complex_covariance(values, alphas)
    target = np.minimum.outer(np.asarray(alphas), np.asarray(alphas))
    deviation = float(np.abs(estimate.matrix - target).max())
    result.statistics = {
        "alphas": list(alphas),
        "matrix_real": estimate.matrix.real.tolist(),
        "matrix_imag": estimate.matrix.imag.tolist(),
        "standard_errors": estimate.standard_errors.tolist(),
        "max_deviation": deviation,
        "n_samples": estimate.n_samples,
    }
    result.checks = {"max_deviation": deviation <= result.thresholds["max_deviation"]}
    outcome = Outcome(result)
    if plot:
        labels = [f"{a:g}" for a in alphas]
        outcome.plots[name] = heatmap_svg(estimate.matrix.real, labels, title=name)
    return outcome


def covariance(config: RunConfig) -> Outcome:
    """Sample covariance of ``Z(alpha_i)`` against ``min(alpha_i, alpha_j)``."""
    n = _require_samples(config)
    grid = np.array([0.0, *COVARIANCE_ALPHAS])
    paths, resamples = sample_subject_paths(config, n, grid)
    values = np.array([path.values[1:] for path in paths])
    outcome = _covariance_outcome("covariance", values, COVARIANCE_ALPHAS, config.plot)
    outcome.result.resamples = resamples
    return outcome


def _two_sample_check(
    name: str,
    config: RunConfig,
    spec: StatisticSpec,
    subject: NDArray[np.float64],
) -> tuple[Outcome, NDArray[np.float64], float]:
    oracle = bm_statistic_sample(
        spec, subject.size, unit_grid(config.oracle_grid_points), config.seed
    )
    result = new_result(name)
    distance = ks_two_sample(_ecdf(subject), _ecdf(oracle))
    result.statistics = {"ks_two_sample": distance, "n_samples": int(subject.size)}
    result.checks = {"ks_two_sample": distance <= result.thresholds["ks_two_sample"]}
    return Outcome(result, samples={"subject": subject, "oracle": oracle}), oracle, distance


def reflection(config: RunConfig) -> Outcome:
    """Horizontal maximum against the Brownian maximum and the half-normal law.

    Both sides carry the subject's sigma >= 3/2 cap. The half-normal comparison uses
    ``sqrt(2)`` times the maximum, the scale on which the limit is ``|N(0, 1)|``.
    """
    n = _require_samples(config)
    paths, resamples = sample_subject_paths(config, n, unit_grid(config.grid_points))
    cap = paths[0].cap if config.component == "real" else -math.inf
    spec = StatisticSpec("max_with_cap", cap=cap, component=config.component)
    subject = _statistic(spec, paths)
    outcome, oracle, _ = _two_sample_check("reflection", config, spec, subject)
    result = outcome.result
    result.resamples = resamples

    floor = math.sqrt(2) * cap

    def capped(u: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.where(u >= floor, half_normal_cdf(u), 0.0)

    def capped_left(u: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.where(u > floor, half_normal_cdf(u), 0.0)

    ks_half = ks_one_sample(_ecdf(math.sqrt(2) * subject), capped, capped_left)
    result.statistics["ks_half_normal"] = ks_half
    result.statistics["cap"] = cap if math.isfinite(cap) else None
    result.statistics["oracle_mean"] = float(oracle.mean())
    result.statistics["subject_mean"] = float(subject.mean())
    result.checks["ks_half_normal"] = ks_half <= result.thresholds["ks_half_normal"]
    if config.plot:
        outcome.plots["reflection"] = ecdf_svg(
            {"subject": math.sqrt(2) * subject, "oracle": math.sqrt(2) * oracle},
            half_normal_cdf,
            title="reflection",
        )
    return outcome


def arcsine(config: RunConfig) -> Outcome:
    """Time spent nonnegative on ``[0, 1]`` against the arcsine law."""
    n = _require_samples(config)
    paths, resamples = sample_subject_paths(config, n, unit_grid(config.grid_points))
    spec = StatisticSpec("arcsine", component=config.component)
    subject = _statistic(spec, paths)
    outcome, oracle, _ = _two_sample_check("arcsine", config, spec, subject)
    result = outcome.result
    result.resamples = resamples
    ks_law = ks_one_sample(_ecdf(subject), arcsine_cdf)
    result.statistics["ks_arcsine"] = ks_law
    result.checks["ks_arcsine"] = ks_law <= result.thresholds["ks_arcsine"]
    if config.plot:
        outcome.plots["arcsine"] = ecdf_svg(
            {"subject": subject, "oracle": oracle}, arcsine_cdf, title="arcsine"
        )
    return outcome


def localtime(config: RunConfig) -> Outcome:
    """Occupation pairing with ``x^+ ^ 1`` over ``[0, 1]`` against the Brownian pairing."""
    n = _require_samples(config)
    paths, resamples = sample_subject_paths(config, n, unit_grid(config.grid_points))
    spec = StatisticSpec("occupation", phi="positive_part_capped", t=1.0, component=config.component)
    subject = _statistic(spec, paths)
    outcome, oracle, _ = _two_sample_check("localtime", config, spec, subject)
    outcome.result.resamples = resamples
    if config.plot:
        outcome.plots["localtime"] = ecdf_svg(
            {"subject": subject, "oracle": oracle}, title="localtime"
        )
    return outcome


def runningsup(config: RunConfig) -> Outcome:
    """Running supremum of ``|Re Z|`` up to ``alpha = 1`` against the Brownian running supremum."""
    n = _require_samples(config)
    paths, resamples = sample_subject_paths(config, n, unit_grid(config.grid_points))
    spec = StatisticSpec("running_sup", alpha=1.0, component=config.component)
    subject = _statistic(spec, paths)
    outcome, oracle, _ = _two_sample_check("runningsup", config, spec, subject)
    outcome.result.resamples = resamples
    outcome.result.statistics["subject_median"] = float(np.median(subject))
    outcome.result.statistics["oracle_median"] = float(np.median(oracle))
    if config.plot:
        outcome.plots["runningsup"] = ecdf_svg(
            {"subject": subject, "oracle": oracle}, title="runningsup"
        )
    return outcome


def signchanges(config: RunConfig) -> Outcome:
    """Fractions of paths with at least 1 and at least 3 sign changes, matched grid."""
    n = _require_samples(config)
    grid = unit_grid(config.grid_points)
    paths, resamples = sample_subject_paths(config, n, grid)
    spec = StatisticSpec("sign_changes", t=1.0, component=config.component)
    subject = _statistic(spec, paths)
    oracle = bm_statistic_sample(spec, n, grid, config.seed)

    result = new_result("signchanges")
    result.resamples = resamples
    gaps = {}
    for k, key in ((1, "at_least_1"), (3, "at_least_3")):
        subject_fraction = float(np.mean(subject >= k))
        oracle_fraction = float(np.mean(oracle >= k))
        gaps[key] = abs(subject_fraction - oracle_fraction)
        result.statistics[f"subject_{key}"] = subject_fraction
        result.statistics[f"oracle_{key}"] = oracle_fraction
    witness = np.mean([sign_change_witness(path, 1.0, config.component) for path in paths])
    result.statistics["witness_fraction"] = float(witness)
    result.statistics["n_samples"] = n
    result.checks = {key: gap <= result.thresholds[key] for key, gap in gaps.items()}
    return Outcome(result, samples={"subject": subject, "oracle": oracle})


def rmt_compare(config: RunConfig) -> Outcome:
    """Characteristic-polynomial paths: covariance against ``min`` and ``Re`` at 1 against zeta."""
    n = _require_samples(config)
    grid = np.array([0.0, *COVARIANCE_ALPHAS])
    matrix_paths, matrix_retries = sample_matrix_paths(config, n, grid, drift_free=True)
    values = np.array([path.values[1:] for path in matrix_paths])
    outcome = _covariance_outcome("rmt_compare", values, COVARIANCE_ALPHAS, config.plot)
    result = outcome.result

    paths, resamples = sample_subject_paths(config, n, np.array([0.0, 1.0]))
    subject = np.array([path.values[-1].real for path in paths])
    matrix_end = values[:, -1].real
    distance = ks_two_sample(_ecdf(matrix_end), _ecdf(subject))
    result.statistics["ks_two_sample"] = distance
    result.statistics["dimension"] = config.rmt_dimension
    result.statistics["matrix_retries"] = matrix_retries
    result.resamples = resamples
    result.checks["ks_two_sample"] = distance <= result.thresholds["ks_two_sample"]
    outcome.samples = {"matrix_re_z1": matrix_end, "subject_re_z1": subject}
    return outcome


@dataclass(frozen=True)
class ProximityBatch:
    config: RunConfig
    start: int
    count: int


def proximity_batch(batch: ProximityBatch) -> tuple[list[float], int]:
    """``|log zeta - prime sum|^2`` at ``sigma = 1/2 + 1/log T`` for one batch of heights."""
    config = batch.config
    table = current_tables(config).primes
    assert table is not None
    sigma = 0.5 + 1 / math.log(config.T)
    low, high = config.tau_bounds()
    squares: list[float] = []
    resamples = 0
    for sample_id in range(batch.start, batch.start + batch.count):
        rng = make_rng(config.seed, Stream.TAU, sample_id)
        for _ in range(MAX_RESAMPLES):
            tau = float(rng.uniform(low, high))
            try:
                value = log_zeta_horizontal(tau, sigma)
                break
            except NearZeroError:
                resamples += 1
        else:
            msg = f"sample {sample_id} hit {MAX_RESAMPLES} near-zero heights in a row"
            raise ZetaLabError(msg)
        squares.append(abs(value - dirichlet_prime_sum(sigma, tau, config.T, table)) ** 2)
    return squares, resamples


def proximity(config: RunConfig) -> Outcome:
    """Mean square distance between log zeta and the prime sum at ``T`` and ``10 T``."""
    n = _require_samples(config)
    result = new_result("proximity")
    means = []
    for height in (config.T, PROXIMITY_HEIGHT_FACTOR * config.T):
        scaled = config.model_copy(
            update={"T": height, "model": "prime_sum", "tau_range": "zero_to_T"}
        )
        tasks = [
            ProximityBatch(scaled, start, min(config.batch_size, n - start))
            for start in range(0, n, config.batch_size)
        ]
        results = run_tasks(proximity_batch, tasks, workers=config.workers)
        means.append(float(np.mean([s for squares, _ in results for s in squares])))
        result.resamples += sum(count for _, count in results)
        logger.info("Mean square distance at T=%s: %.4f", height, means[-1])
    growth = means[1] / means[0] - 1 if means[0] > 0 else 0.0
    result.statistics = {"mean_square": means, "growth": growth, "n_samples": n}
    result.checks = {
        "max_mean_square": max(means) <= result.thresholds["max_mean_square"],
        "max_growth": growth < result.thresholds["max_growth"],
    }
    return Outcome(result)
