"""Numeric checks of the moment and mean-value lemmas behind the limit theorems."""

import itertools
import logging
import math

import numpy as np

from app.config import RunConfig
from app.core.arith import build_mollifier
from app.core.errors import NearZeroError
from app.core.random_streams import Stream, SuiteTask, make_rng
from app.core.stats import (
    fourth_moment_check,
    increment_weights,
    lemma22_hypotheses_check,
    lemma33_check,
    mv_mean_value_check,
)
from app.core.zeta import ex_residual
from app.experiments.base import Outcome, new_result
from app.experiments.sampling import prime_table

logger = logging.getLogger(__name__)

LEMMA33_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)
LEMMA33_HEIGHTS = (1e6, 1e8, 1e10)
MV_CASES = 100
MV_MAX_TERMS = 20
FOURTH_MOMENT_PAIRS = ((0.0, 0.5), (0.25, 0.75), (0.5, 1.0), (0.9, 1.0))
LEMMA22_ALPHAS = (0.25, 0.5, 0.75, 1.0)
EX_DECAY_CUTOFFS = (10.0, 100.0, 1000.0)
EX_DECAY_SIGMA = 1.0
EX_DECAY_HEIGHTS = 50
EX_DECAY_RANGE = (1e3, 1e4)


def lemma33(config: RunConfig, heights: tuple[float, ...] = LEMMA33_HEIGHTS) -> Outcome:
    """Prime-sum differences over ``(beta - alpha) log log T`` on the level grid."""
    result = new_result("lemma33")
    limit = math.floor(max(h**config.x_exponent for h in heights) ** 3)
    table = prime_table(max(limit, 2))
    ratios = {}
    for height in heights:
        x = height**config.x_exponent
        for alpha, beta in itertools.combinations_with_replacement(LEMMA33_LEVELS, 2):
            ratios[f"T={height:g},alpha={alpha},beta={beta}"] = lemma33_check(
                alpha, beta, x, height, table
            )
    worst = max(abs(r) for r in ratios.values())
    result.statistics = {"ratios": ratios, "max_abs_ratio": worst}
    result.checks = {"max_abs_ratio": worst <= result.thresholds["max_abs_ratio"]}
    return Outcome(result)


def mv(config: RunConfig, cases: int = MV_CASES) -> Outcome:
    """Randomized frequency sets through the exact mean-value integral."""
    result = new_result("mv")
    errors = []
    for case in range(cases):
        rng = make_rng(config.seed, Stream.SUITE, SuiteTask.MEAN_VALUE, case)
        size = int(rng.integers(1, MV_MAX_TERMS + 1))
        lambdas = np.sort(rng.uniform(0.0, 50.0, size))
        coefficients = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        length = float(rng.uniform(10.0, 1000.0))
        errors.append(mv_mean_value_check(lambdas, coefficients, length).normalized_error)

    single = mv_mean_value_check([1.5], [0.3 - 0.4j], 100.0)
    single_error = abs(single.numeric_integral - single.main_term) / single.main_term
    worst = max(errors, default=0.0)
    result.statistics = {
        "max_normalized_error": worst,
        "single_frequency_relative": single_error,
        "cases": cases,
    }
    result.checks = {
        "max_normalized_error": worst <= result.thresholds["max_normalized_error"],
        "single_frequency_relative": single_error
        <= result.thresholds["single_frequency_relative"],
    }
    return Outcome(result, samples={"normalized_error": np.array(errors)})


def fourth_moment(config: RunConfig) -> Outcome:
    """Fourth moment of the increment weights against the squared second-moment bound."""
    result = new_result("fourth_moment")
    x = config.x
    table = prime_table(max(math.floor(x**3), 2))
    ratios = {}
    for a, b in FOURTH_MOMENT_PAIRS:
        phi = increment_weights(
            a, b, config.T, table, config.x_exponent, config.mollifier_normalization
        )
        check = fourth_moment_check(phi, x, config.T, config.n_samples, config.seed)
        ratios[f"a={a},b={b}"] = {
            "estimate": check.estimate,
            "bound": check.bound,
            "diagonal": check.diagonal,
            "standard_error": check.standard_error,
            "ratio": check.ratio,
        }
        logger.info("Fourth moment (%s, %s): ratio %.3f", a, b, check.ratio)
    worst = max(entry["ratio"] for entry in ratios.values())
    result.statistics = {"pairs": ratios, "max_ratio": worst, "n_samples": config.n_samples}
    result.checks = {"max_ratio": worst <= result.thresholds["max_ratio"]}
    return Outcome(result)


def lemma22(config: RunConfig) -> Outcome:
    """Coefficient hypotheses of the Gaussian limit lemma at height ``T``."""
    result = new_result("lemma22")
    table = prime_table(math.floor(config.T))
    report = lemma22_hypotheses_check(LEMMA22_ALPHAS, config.T, table)
    last = len(LEMMA22_ALPHAS) - 1
    top_ratio = report.pair_ratios[last][last]
    result.statistics = report.model_dump()
    result.checks = {
        "sup_at_two": report.sup_prime == 2,
        "ratio_band": top_ratio is not None
        and result.thresholds["ratio_low"] <= top_ratio <= result.thresholds["ratio_high"],
        "tail_fraction": report.tail_fraction <= result.thresholds["tail_fraction"],
    }
    return Outcome(result)


def ex_decay(
    config: RunConfig,
    cutoffs: tuple[float, ...] = EX_DECAY_CUTOFFS,
    heights: int = EX_DECAY_HEIGHTS,
) -> Outcome:
    """Log-log slope of the mean residual ``|e_x(sigma + it)|`` against ``x``.

    Every height is evaluated at every cutoff through the ``log_form`` of ``ex_residual``;
    heights where zeta is near zero are skipped for all cutoffs.
    """
    result = new_result("ex_decay")
    table = prime_table(math.floor(max(cutoffs) ** 3))
    mollifiers = [build_mollifier(x, table, config.mollifier_normalization) for x in cutoffs]
    rng = make_rng(config.seed, Stream.SUITE, SuiteTask.EX_DECAY)
    residuals: list[list[float]] = []
    for t in rng.uniform(*EX_DECAY_RANGE, size=heights):
        try:
            residuals.append(
                [abs(ex_residual(EX_DECAY_SIGMA, float(t), mollifier)) for mollifier in mollifiers]
            )
        except NearZeroError:
            logger.warning("Skipping height %s near a zero", t)
    means = np.array(residuals).reshape(-1, len(cutoffs)).mean(axis=0).tolist()
    for x, mean in zip(cutoffs, means, strict=True):
        logger.info("Mean |e_x| at x=%s: %.4e", x, mean)
    slope = float(np.polyfit(np.log(cutoffs), np.log(means), 1)[0])
    result.statistics = {
        "cutoffs": list(cutoffs),
        "mean_residual": means,
        "slope": slope,
        "skipped": heights - len(residuals),
    }
    result.checks = {"max_slope": slope <= result.thresholds["max_slope"]}
    return Outcome(result)
