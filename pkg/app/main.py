"""Command-line entry point: ``zeta-brownian sample|verify|plot``."""

import argparse
import logging
import sys
import time
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.config import RunConfig, get_settings, load_run_config
from app.core.errors import SchemaError, ZetaLabError
from app.experiments.coordinator import EXPERIMENTS, Coordinator
from app.experiments.sampling import sample_zeta_paths
from app.services.artifacts import (
    PATHS_SCHEMA,
    STATISTICS_SCHEMA,
    ArtifactWriter,
    read_csv,
)
from app.services.svg import ecdf_svg, paths_svg

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2
# Paths drawn by ``sample --plot``
PLOTTED_PATHS = 20


def _run_options(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    add("--config", type=Path, default=None, help="Flat key-value config file")
    add("--T", dest="T", type=float, default=None, help="Height T")
    add("--n", dest="n_samples", type=int, default=None, help="Number of samples")
    add("--model", choices=["direct", "prime_sum", "selberg_mollified"], default=None)
    add("--x-exp", dest="x_exponent", type=float, default=None, help="x = T^x_exp")
    add("--grid", dest="grid_points", type=int, default=None, help="Alpha grid points")
    add("--alpha-max", dest="alpha_max", type=float, default=None)
    add("--tau-range", dest="tau_range", choices=["zero_to_T", "T_to_2T"], default=None)
    add("--seed", type=int, default=None)
    add("--workers", type=int, default=None)
    add("--out", dest="output_dir", type=Path, default=None, help="Output directory")
    add("--plot", action="store_true", default=None, help="Write SVG plots")
    add("--subject", choices=["zeta", "oracle"], default=None)
    add("--component", choices=["real", "imag"], default=None)
    add("--batch-size", dest="batch_size", type=int, default=None)
    add("--oracle-grid", dest="oracle_grid_points", type=int, default=None)
    add("--rmt-n", dest="rmt_dimension", type=int, default=None)
    add(
        "--mollifier",
        dest="mollifier_normalization",
        choices=["selberg", "literal"],
        default=None,
    )


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser.

    Returns:
        Parser with the sample, verify and plot subcommands
    """
    parser = argparse.ArgumentParser(
        prog="zeta-brownian",
        description="Numerical laboratory for the horizontal log-zeta process",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sample = commands.add_parser("sample", help="Sample paths to CSV")
    _run_options(sample)

    verify = commands.add_parser("verify", help="Run experiments and write a JSON report")
    _run_options(verify)
    verify.add_argument(
        "--experiment",
        action="append",
        choices=sorted(EXPERIMENTS),
        default=None,
        help="Experiment to run (repeatable; default: all)",
    )

    plot = commands.add_parser("plot", help="Render a CSV as SVG")
    plot.add_argument("csv_path", type=Path)
    plot.add_argument("--kind", choices=["paths", "ecdf"], default="paths")
    plot.add_argument("--out", dest="output", type=Path, default=None, help="SVG file")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    fields = set(RunConfig.model_fields) - {"config_file"}
    overrides = {key: value for key, value in vars(args).items() if key in fields}
    return load_run_config(args.config, **overrides)


def cmd_sample_paths(config: RunConfig) -> int:
    """Write ``paths.csv`` and ``manifest.json`` for ``config.n_samples`` paths."""
    started = time.perf_counter()
    writer = ArtifactWriter(config.output_dir)
    paths, resamples = sample_zeta_paths(config, config.n_samples)
    rows = (
        (path.tau, float(alpha), float(value.real), float(value.imag), path.model)
        for path in paths
        for alpha, value in zip(path.alpha_grid, path.values, strict=True)
    )
    writer.write_csv("paths.csv", PATHS_SCHEMA, rows)
    if config.plot:
        series = [(path.alpha_grid, path.values.real) for path in paths[:PLOTTED_PATHS]]
        writer.write_svg("paths.svg", paths_svg(series, title=f"Re Z, T={config.T:g}"))
    Coordinator(config, writer).write_manifest(
        "sample", time.perf_counter() - started, rejections=resamples
    )
    return EXIT_OK


def cmd_verify(config: RunConfig, experiments: Sequence[str] | None) -> int:
    """Run experiments; exit status 0 only if every asserted threshold passes."""
    names = list(experiments) if experiments else list(EXPERIMENTS)
    report = Coordinator(config, ArtifactWriter(config.output_dir)).verify(names)
    for name, result in report.results.items():
        failed = [check for check, ok in result.checks.items() if not ok]
        if failed:
            logger.warning("%s failed checks: %s", name, ", ".join(failed))
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_plot(csv_path: Path, kind: str, output: Path | None = None) -> Path:
    """Render a paths CSV as polylines or a statistics CSV as ECDF overlays.

    Raises:
        SchemaError: when the CSV schema does not fit ``kind``
    """
    if kind == "paths":
        table = read_csv(csv_path)
        if table.schema != PATHS_SCHEMA:
            msg = f"{csv_path} holds {table.schema}, not paths"
            raise SchemaError(msg)
        grouped: dict[str, tuple[list[float], list[float]]] = {}
        for row in table.rows:
            record = dict(zip(table.columns, row, strict=True))
            alphas, values = grouped.setdefault(record["tau"], ([], []))
            alphas.append(float(record["alpha"]))
            values.append(float(record["re_z"]))
        document = paths_svg(list(grouped.values()), title=csv_path.stem)
    else:
        table = read_csv(csv_path, expected=STATISTICS_SCHEMA)
        samples: dict[str, list[float]] = {}
        for _, statistic, value in table.rows:
            samples.setdefault(statistic, []).append(float(value))
        document = ecdf_svg(
            {name: np.array(values) for name, values in samples.items()}, title=csv_path.stem
        )
    target = output or csv_path.with_suffix(".svg")
    target.write_text(document)
    logger.info("Wrote %s", target)
    return target


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the command and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    settings = get_settings()

    # Set logging level from settings
    logging.getLogger().setLevel(settings.LOG_LEVEL)

    try:
        if args.command == "plot":
            cmd_plot(args.csv_path, args.kind, args.output)
            return EXIT_OK
        config = _config(args)
        if args.command == "sample":
            return cmd_sample_paths(config)
        return cmd_verify(config, args.experiment)
    except ValidationError as e:
        logger.error("Invalid configuration: %s", e)
        return EXIT_ERROR
    except (ZetaLabError, OSError) as e:
        logger.exception("%s failed: %s", args.command, e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
