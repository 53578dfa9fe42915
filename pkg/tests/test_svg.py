"""Tests for SVG rendering."""

import xml.etree.ElementTree as ET

import numpy as np

from app.core.oracle import arcsine_cdf
from app.services.svg import ecdf_svg, heatmap_svg, paths_svg

SVG = "{http://www.w3.org/2000/svg}"


def _parse(document):
    return ET.fromstring(document)


def test_paths_svg_draws_one_polyline_per_series():
    """Test the polyline count and the well-formed document."""
    grid = np.linspace(0.0, 1.0, 11)
    document = paths_svg([(grid, grid), (grid, -grid), (grid, grid**2)], title="paths & more")
    root = _parse(document)
    assert len(root.findall(f"{SVG}polyline")) == 3
    assert "paths &amp; more" in document


def test_paths_svg_is_deterministic():
    """Test byte-identical output for identical input."""
    grid = np.linspace(0.0, 1.0, 50)
    series = [(grid, np.sin(7 * grid))]
    assert paths_svg(series) == paths_svg(series)


def test_empty_inputs_give_axes_only_documents():
    """Test the empty cases."""
    for document in (paths_svg([]), ecdf_svg({}), heatmap_svg([], [])):
        root = _parse(document)
        assert root.findall(f"{SVG}polyline") == []
        assert root.find(f"{SVG}g") is not None


def test_ecdf_svg_with_reference_curve():
    """Test one step polyline per sample plus the dashed reference."""
    rng = np.random.default_rng(0)
    document = ecdf_svg(
        {"zeta": rng.uniform(size=30), "oracle": rng.uniform(size=40)},
        reference=arcsine_cdf,
        title="arcsine",
    )
    polylines = _parse(document).findall(f"{SVG}polyline")
    assert len(polylines) == 3
    assert polylines[-1].get("stroke-dasharray") == "4,3"


def test_heatmap_svg_cells():
    """Test k^2 cells for a k x k matrix."""
    matrix = np.array([[1.0, 0.5, 0.2], [0.5, 1.0, 0.5], [0.2, 0.5, 1.0]])
    root = _parse(heatmap_svg(matrix, ["0.25", "0.5", "1"]))
    # background rect plus one per cell
    assert len(root.findall(f"{SVG}rect")) == 1 + 9
