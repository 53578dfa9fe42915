"""Deterministic SVG rendering of polylines, ECDF overlays and heatmaps.

Output depends only on the input numbers: fixed canvas, fixed palette, coordinates
rounded to two decimals, no timestamps or ids.
"""

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np
from numpy.typing import ArrayLike, NDArray

WIDTH = 640
HEIGHT = 400
MARGIN = 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class _Frame:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @classmethod
    def around(cls, xs: Sequence[NDArray[np.float64]], ys: Sequence[NDArray[np.float64]]) -> "_Frame":
        if not xs or all(x.size == 0 for x in xs):
            return cls(0.0, 1.0, 0.0, 1.0)
        x_all = np.concatenate(xs)
        y_all = np.concatenate(ys)
        x_min, x_max = float(x_all.min()), float(x_all.max())
        y_min, y_max = float(y_all.min()), float(y_all.max())
        if x_max == x_min:
            x_max = x_min + 1.0
        if y_max == y_min:
            y_min, y_max = y_min - 0.5, y_max + 0.5
        return cls(x_min, x_max, y_min, y_max)

    def points(self, x: NDArray[np.float64], y: NDArray[np.float64]) -> str:
        px = MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2 * MARGIN)
        py = HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2 * MARGIN)
        return " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py, strict=True))


def _document(title: str, body: list[str], frame: _Frame) -> str:
    left, bottom = MARGIN, HEIGHT - MARGIN
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<g class="axes" stroke="black" stroke-width="1">'
        f'<line x1="{left}" y1="{bottom}" x2="{WIDTH - MARGIN}" y2="{bottom}"/>'
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{MARGIN}"/></g>',
        f'<text x="{left}" y="{bottom + 16}" font-size="10">{frame.x_min:.3g}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{bottom + 16}" font-size="10" text-anchor="end">'
        f"{frame.x_max:.3g}</text>",
        f'<text x="{left - 4}" y="{bottom}" font-size="10" text-anchor="end">{frame.y_min:.3g}</text>',
        f'<text x="{left - 4}" y="{MARGIN + 4}" font-size="10" text-anchor="end">'
        f"{frame.y_max:.3g}</text>",
        *body,
        "</svg>",
    ]
    return "\n".join(lines) + "\n"


def _polyline(frame: _Frame, x: NDArray[np.float64], y: NDArray[np.float64], color: str) -> str:
    return (
        f'<polyline fill="none" stroke="{color}" stroke-width="1" '
        f'points="{frame.points(x, y)}"/>'
    )


def paths_svg(series: Sequence[tuple[ArrayLike, ArrayLike]], title: str = "paths") -> str:
    """One polyline per ``(x, y)`` series; no series gives an axes-only document."""
    xs = [np.asarray(x, dtype=np.float64) for x, _ in series]
    ys = [np.asarray(y, dtype=np.float64) for _, y in series]
    frame = _Frame.around(xs, ys)
    body = [
        _polyline(frame, x, y, PALETTE[k % len(PALETTE)])
        for k, (x, y) in enumerate(zip(xs, ys, strict=True))
        if x.size
    ]
    return _document(title, body, frame)


def _ecdf_steps(samples: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    ordered = np.sort(samples)
    levels = np.arange(1, ordered.size + 1) / ordered.size
    x = np.repeat(ordered, 2)
    y = np.concatenate([[0.0], np.repeat(levels, 2)[:-1]])
    return x, y


def ecdf_svg(
    samples: Mapping[str, ArrayLike],
    reference: Callable[[NDArray[np.float64]], ArrayLike] | None = None,
    title: str = "ECDF",
) -> str:
    """ECDF step functions of each labelled sample, optionally over a reference CDF."""
    steps = [_ecdf_steps(np.asarray(s, dtype=np.float64)) for s in samples.values()]
    steps = [(x, y) for x, y in steps if x.size]
    frame = _Frame.around([x for x, _ in steps], [np.array([0.0, 1.0])] * len(steps))
    body = [
        _polyline(frame, x, y, PALETTE[k % len(PALETTE)]) for k, (x, y) in enumerate(steps)
    ]
    if reference is not None and steps:
        grid = np.linspace(frame.x_min, frame.x_max, 200)
        curve = np.asarray(reference(grid), dtype=np.float64)
        body.append(
            f'<polyline fill="none" stroke="black" stroke-dasharray="4,3" '
            f'points="{frame.points(grid, curve)}"/>'
        )
    for k, label in enumerate(samples):
        body.append(
            f'<text x="{WIDTH - MARGIN}" y="{MARGIN + 14 * k}" font-size="10" text-anchor="end" '
            f'fill="{PALETTE[k % len(PALETTE)]}">{escape(label)}</text>'
        )
    return _document(title, body, frame)


def heatmap_svg(matrix: ArrayLike, labels: Sequence[str], title: str = "covariance") -> str:
    """Grey-scale cells for a real matrix, darker for larger values, with cell values printed."""
    values = np.asarray(matrix, dtype=np.float64)
    k = values.shape[0]
    frame = _Frame(0.0, float(max(k, 1)), 0.0, float(max(k, 1)))
    body: list[str] = []
    if values.size:
        low, high = float(values.min()), float(values.max())
        span = high - low or 1.0
        size = (WIDTH - 2 * MARGIN) / k
        height = (HEIGHT - 2 * MARGIN) / k
        for i in range(k):
            for j in range(k):
                shade = int(round(255 * (1 - (values[i, j] - low) / span)))
                x = MARGIN + j * size
                y = MARGIN + i * height
                body.append(
                    f'<rect x="{x:.2f}" y="{y:.2f}" width="{size:.2f}" height="{height:.2f}" '
                    f'fill="rgb({shade},{shade},{shade})"/>'
                )
                body.append(
                    f'<text x="{x + size / 2:.2f}" y="{y + height / 2:.2f}" font-size="10" '
                    f'text-anchor="middle" fill="red">{values[i, j]:.3f}</text>'
                )
        for i, label in enumerate(labels):
            body.append(
                f'<text x="{MARGIN - 4}" y="{MARGIN + (i + 0.5) * height:.2f}" font-size="10" '
                f'text-anchor="end">{escape(label)}</text>'
            )
    return _document(title, body, frame)
