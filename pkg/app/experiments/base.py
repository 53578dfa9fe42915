"""Shared result carrier and the frozen acceptance thresholds."""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from app.models.schemas import ExperimentResult

# Calibrated once against the oracles and then frozen
THRESHOLDS: dict[str, dict[str, float]] = {
    "clt": {"ks_real": 0.15, "ks_imag": 0.15},
    "covariance": {"max_deviation": 0.15},
    "reflection": {"ks_two_sample": 0.10, "ks_half_normal": 0.15},
    "arcsine": {"ks_two_sample": 0.10, "ks_arcsine": 0.15},
    "localtime": {"ks_two_sample": 0.10},
    "runningsup": {"ks_two_sample": 0.10},
    "signchanges": {"at_least_1": 0.05, "at_least_3": 0.07},
    "rmt_compare": {"max_deviation": 0.20, "ks_two_sample": 0.15},
    "lemma33": {"max_abs_ratio": 5.0},
    "mv": {"max_normalized_error": 10.0, "single_frequency_relative": 1e-12},
    "fourth_moment": {"max_ratio": 20.0},
    "lemma22": {"ratio_low": 0.6, "ratio_high": 1.4, "tail_fraction": 0.2},
    "ex_decay": {"max_slope": -0.3},
    "proximity": {"max_mean_square": 10.0, "max_growth": 0.5},
}


@dataclass
class Outcome:
    """An experiment's result plus the per-sample statistics and SVG documents it produced."""

    result: ExperimentResult
    samples: dict[str, NDArray[np.float64]] = field(default_factory=dict)
    plots: dict[str, str] = field(default_factory=dict)


def new_result(experiment: str) -> ExperimentResult:
    return ExperimentResult(experiment=experiment, thresholds=dict(THRESHOLDS[experiment]))
