"""Pydantic models for reports and run manifests."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class ExperimentResult(BaseModel):
    """Statistics and threshold outcomes of one experiment."""

    experiment: str
    statistics: dict[str, Any] = Field(default_factory=dict)
    thresholds: dict[str, float] = Field(default_factory=dict)
    checks: dict[str, bool] = Field(
        default_factory=dict, description="Pass/fail per asserted threshold"
    )
    resamples: int = Field(0, description="Near-zero rejections that forced a new height")
    wall_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


class Report(BaseModel):
    """JSON report of ``verify``: keys ``config``, ``results``, ``thresholds`` and ``pass``."""

    model_config = ConfigDict(populate_by_name=True)

    config: dict[str, Any]
    results: dict[str, ExperimentResult]
    thresholds: dict[str, dict[str, float]]
    passed: bool = Field(..., alias="pass")


class OutputRecord(BaseModel):
    """A file written by a run."""

    path: str
    rows: int | None = None
    sha256: str


class RunManifest(BaseModel):
    """Everything needed to reproduce a run's outputs."""

    command: str
    version: str
    config: dict[str, Any]
    outputs: list[OutputRecord] = Field(default_factory=list)
    results: dict[str, ExperimentResult] = Field(default_factory=dict)
    rejections: int = 0
    wall_seconds: float = 0.0


class Lemma22Report(BaseModel):
    """Finite-T values of the hypotheses of the Gaussian limit lemma for prime sums."""

    T: float
    alphas: list[float]
    sup_coefficient: float = Field(..., description="sup_p |a_p|")
    sup_prime: int = Field(..., description="Prime where the sup is attained")
    sum_squares: float
    m_T: float = Field(..., description="Tail start T^(1/log log T)")
    tail_sum: float
    weighted_tail_sum: float = Field(..., description="Tail with the (1 + p/T) weight")
    tail_fraction: float
    pair_ratios: list[list[float | None]] = Field(
        ..., description="sum_p p^(-sigma_i - sigma_j) / (min(1, a_i, a_j) log log T)"
    )
