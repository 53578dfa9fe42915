"""End-to-end tests of the zeta-brownian command line."""

import json
import math

import pytest

from app.core.arith import sieve
from app.core.errors import SchemaError
from app.core.zeta import dirichlet_prime_sum
from app.main import EXIT_ERROR, EXIT_OK, build_parser, cmd_plot, main
from app.services.artifacts import read_csv

SMALL_RUN = ["--T", "1000", "--model", "prime_sum", "--grid", "9", "--batch-size", "2"]


def _sample(out, *extra):
    return main(["sample", *SMALL_RUN, "--out", str(out), *extra])


def test_parser_maps_flags_to_config_fields():
    """Test flag destinations."""
    args = build_parser().parse_args(["sample", "--T", "5e5", "--x-exp", "0.1", "--rmt-n", "8"])
    assert args.T == 5e5
    assert args.x_exponent == 0.1
    assert args.rmt_dimension == 8
    assert args.n_samples is None


def test_sample_with_no_paths_writes_header_only(tmp_path):
    """Test n = 0."""
    assert _sample(tmp_path, "--n", "0") == EXIT_OK
    lines = (tmp_path / "paths.csv").read_text().splitlines()
    assert lines == ["# schema: paths/v1", "tau,alpha,re_z,im_z,model"]
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "sample"
    assert manifest["rejections"] == 0
    assert manifest["outputs"][0]["rows"] == 0


def test_sample_output_does_not_depend_on_worker_count(tmp_path):
    """Test byte-identical CSVs from one and two workers."""
    assert _sample(tmp_path / "one", "--n", "6", "--workers", "1") == EXIT_OK
    assert _sample(tmp_path / "two", "--n", "6", "--workers", "2") == EXIT_OK
    one = (tmp_path / "one" / "paths.csv").read_bytes()
    two = (tmp_path / "two" / "paths.csv").read_bytes()
    assert one == two


def test_sampled_rows_reproduce_the_prime_sum(tmp_path):
    """Test every written value against a direct evaluation of its (tau, alpha)."""
    assert _sample(tmp_path, "--n", "3") == EXIT_OK
    table = read_csv(tmp_path / "paths.csv")
    assert len(table.rows) == 3 * 9
    primes = sieve(1000)
    scale = math.sqrt(math.log(math.log(1000)))
    for tau, alpha, re_z, im_z, model in table.rows:
        assert model == "prime_sum"
        assert 1000 <= float(tau) <= 2000
        sigma = 0.5 + math.log(1000) ** -float(alpha)
        expected = dirichlet_prime_sum(sigma, float(tau), 1000, primes) / scale
        assert float(re_z) == pytest.approx(expected.real, abs=1e-9)
        assert float(im_z) == pytest.approx(expected.imag, abs=1e-9)


def test_sample_plot_and_replot(tmp_path):
    """Test the sample SVG and re-plotting the CSV."""
    assert _sample(tmp_path, "--n", "2", "--plot") == EXIT_OK
    assert (tmp_path / "paths.svg").exists()
    target = cmd_plot(tmp_path / "paths.csv", "paths")
    assert target == tmp_path / "paths.svg"
    assert main(["plot", str(tmp_path / "paths.csv"), "--out", str(tmp_path / "again.svg")]) == EXIT_OK
    assert (tmp_path / "again.svg").read_text().count("<polyline") == 2


def test_plot_rejects_the_wrong_schema(tmp_path):
    """Test ECDF plotting of a paths file and a missing file."""
    assert _sample(tmp_path, "--n", "1") == EXIT_OK
    with pytest.raises(SchemaError):
        cmd_plot(tmp_path / "paths.csv", "ecdf")
    assert main(["plot", str(tmp_path / "paths.csv"), "--kind", "ecdf"]) == EXIT_ERROR
    assert main(["plot", str(tmp_path / "missing.csv")]) == EXIT_ERROR


def test_verify_mean_value_experiment(tmp_path):
    """Test a passing verify run and the report layout."""
    assert main(["verify", "--experiment", "mv", "--out", str(tmp_path)]) == EXIT_OK
    report = json.loads((tmp_path / "report.json").read_text())
    assert set(report) == {"config", "results", "thresholds", "pass"}
    assert report["pass"] is True
    assert report["results"]["mv"]["checks"]["max_normalized_error"] is True
    assert (tmp_path / "mv_statistics.csv").exists()
    assert (tmp_path / "manifest.json").exists()


def test_verify_arcsine_on_the_oracle_subject(tmp_path):
    """Test the arcsine experiment with Brownian paths substituted for zeta paths."""
    args = ["--subject", "oracle", "--n", "2000", "--oracle-grid", "1024", "--grid", "256"]
    assert main(["verify", "--experiment", "arcsine", *args, "--out", str(tmp_path)]) == EXIT_OK
    report = json.loads((tmp_path / "report.json").read_text())
    result = report["results"]["arcsine"]
    assert result["statistics"]["ks_two_sample"] <= 0.10
    assert result["statistics"]["ks_arcsine"] <= 0.15
    statistics = read_csv(tmp_path / "arcsine_statistics.csv")
    assert set(statistics.column("statistic")) == {"subject", "oracle"}


def test_ecdf_plot_of_experiment_statistics(tmp_path):
    """Test plotting the per-sample statistics of an experiment."""
    args = ["--subject", "oracle", "--n", "50", "--oracle-grid", "128", "--grid", "64"]
    main(["verify", "--experiment", "localtime", *args, "--out", str(tmp_path)])
    target = cmd_plot(tmp_path / "localtime_statistics.csv", "ecdf")
    assert target.read_text().count("<polyline") == 2


def test_invalid_configuration_exits_with_error(tmp_path):
    """Test a rejected parameter value and a bad config file."""
    assert _sample(tmp_path, "--n", "-3") == EXIT_ERROR
    config = tmp_path / "run.env"
    config.write_text("T=3\n")
    assert main(["sample", "--config", str(config), "--out", str(tmp_path)]) == EXIT_ERROR
