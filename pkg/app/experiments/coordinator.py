"""Coordinator that dispatches experiments and assembles reports and manifests."""

import logging
import time
from collections.abc import Callable

from app import __version__
from app.config import RunConfig
from app.experiments import lemmas, limit_laws
from app.experiments.base import THRESHOLDS, Outcome
from app.models.schemas import ExperimentResult, Report, RunManifest
from app.services.artifacts import STATISTICS_SCHEMA, ArtifactWriter

logger = logging.getLogger(__name__)

Experiment = Callable[[RunConfig], Outcome]

EXPERIMENTS: dict[str, Experiment] = {
    "clt": limit_laws.clt,
    "covariance": limit_laws.covariance,
    "reflection": limit_laws.reflection,
    "arcsine": limit_laws.arcsine,
    "localtime": limit_laws.localtime,
    "runningsup": limit_laws.runningsup,
    "signchanges": limit_laws.signchanges,
    "rmt_compare": limit_laws.rmt_compare,
    "proximity": limit_laws.proximity,
    "lemma33": lemmas.lemma33,
    "mv": lemmas.mv,
    "fourth_moment": lemmas.fourth_moment,
    "lemma22": lemmas.lemma22,
    "ex_decay": lemmas.ex_decay,
}


class Coordinator:
    """Runs experiments for one configuration and writes their artifacts."""

    def __init__(self, config: RunConfig, writer: ArtifactWriter):
        """Initialize the coordinator.

        Args:
            config: Run configuration shared by every experiment
            writer: Destination for CSV, JSON and SVG outputs
        """
        self.config = config
        self.writer = writer

    def run(self, name: str) -> Outcome:
        """Run one experiment, timing it and writing its samples and plots."""
        if name not in EXPERIMENTS:
            msg = f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}"
            raise KeyError(msg)
        logger.info("Starting experiment %s", name)
        started = time.perf_counter()
        outcome = EXPERIMENTS[name](self.config)
        outcome.result.wall_seconds = time.perf_counter() - started

        if outcome.samples:
            rows = [
                (sample_id, statistic, float(value))
                for statistic, values in outcome.samples.items()
                for sample_id, value in enumerate(values)
            ]
            self.writer.write_csv(f"{name}_statistics.csv", STATISTICS_SCHEMA, rows)
        for plot_name, document in outcome.plots.items():
            self.writer.write_svg(f"{plot_name}.svg", document)

        status = "passed" if outcome.result.passed else "FAILED"
        logger.info("Experiment %s %s in %.2fs", name, status, outcome.result.wall_seconds)
        return outcome

    def verify(self, names: list[str]) -> Report:
        """Run ``names`` in order and write ``report.json`` and ``manifest.json``."""
        started = time.perf_counter()
        results = {name: self.run(name).result for name in names}
        report = Report(
            config=self.config.echo(),
            results=results,
            thresholds={name: THRESHOLDS[name] for name in names},
            passed=all(result.passed for result in results.values()),
        )
        self.writer.write_json("report.json", report)
        self.write_manifest("verify", time.perf_counter() - started, results=results)
        return report

    def write_manifest(
        self,
        command: str,
        wall_seconds: float,
        rejections: int | None = None,
        results: dict[str, ExperimentResult] | None = None,
    ) -> RunManifest:
        results = results or {}
        manifest = RunManifest(
            command=command,
            version=__version__,
            config=self.config.echo(),
            outputs=list(self.writer.records),
            results=results,
            rejections=(
                rejections
                if rejections is not None
                else sum(result.resamples for result in results.values())
            ),
            wall_seconds=wall_seconds,
        )
        self.writer.write_json("manifest.json", manifest)
        return manifest
