"""Sampled trajectories of the horizontal log-zeta process and their path functionals.

Path functionals accept any ``Trajectory`` (zeta-side ``ProcessPath``, Brownian
oracle paths, random-matrix paths), so subject and oracle statistics share one
implementation.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal, Protocol, runtime_checkable

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import trapezoid

from app.config import RunConfig
from app.core.arith import MollifierTable, PrimeTable
from app.core.errors import CapacityError, DomainError
from app.core.zeta import (
    ZETA_THREE_HALVES,
    DirichletModelConfig,
    log_zeta_line,
    prime_sum_matrix,
    selberg_sum_matrix,
)

logger = logging.getLogger(__name__)

MIN_TAU = 2.0
OCCUPATION_BIN_WIDTH = 0.05

PathModel = Literal["direct", "prime_sum", "selberg_mollified"]
Component = Literal["real", "imag"]
Phi = Callable[[NDArray[np.float64]], NDArray[np.float64] | float]


@runtime_checkable
class Trajectory(Protocol):
    """Anything sampled on an alpha grid that the path functionals can read."""

    @property
    def alpha_grid(self) -> NDArray[np.float64]: ...

    @property
    def values(self) -> NDArray[np.complex128]: ...

    @property
    def cap(self) -> float: ...


def normalization(T: float) -> float:
    """``sqrt(log log T)``."""
    return math.sqrt(math.log(math.log(T)))


def sigmas_for(T: float, alpha_grid: NDArray[np.float64]) -> NDArray[np.float64]:
    """Abscissae ``1/2 + (log T)^(-alpha)`` of an alpha grid."""
    return 0.5 + np.log(T) ** (-np.asarray(alpha_grid, dtype=np.float64))


@dataclass(frozen=True)
class ProcessPath:
    """One trajectory ``alpha -> Z^(T)(alpha)`` at height ``tau``."""

    T: float
    tau: float
    alpha_grid: NDArray[np.float64]
    values: NDArray[np.complex128]
    model: PathModel
    normalization: float

    @property
    def cap(self) -> float:
        """Bound on log|zeta| for sigma >= 3/2, on the path's scale."""
        return math.log(ZETA_THREE_HALVES) / self.normalization

    @property
    def sigmas(self) -> NDArray[np.float64]:
        return sigmas_for(self.T, self.alpha_grid)


@dataclass(frozen=True)
class ModelTables:
    """Arithmetic tables a path model needs."""

    primes: PrimeTable | None = None
    mollifier: MollifierTable | None = None


@dataclass(frozen=True)
class PathStatistics:
    max_real: float
    arcsine_measure: float
    sign_changes: int
    running_sup: NDArray[np.float64]
    occupation: tuple[NDArray[np.float64], NDArray[np.float64]]


def sample_paths(
    config: RunConfig,
    taus: Sequence[float],
    tables: ModelTables,
    alpha_grid: NDArray[np.float64] | None = None,
) -> list[ProcessPath]:
    """Sample one path per height in ``taus``.

    Dirichlet models are evaluated for all heights at once; the direct model walks
    log zeta separately per height.

    Raises:
        DomainError: for a height below 2
        NearZeroError: from the direct model (the caller resamples)
        CapacityError: when ``tables`` do not cover the model's cutoff
    """
    grid = config.alpha_grid() if alpha_grid is None else np.asarray(alpha_grid, dtype=np.float64)
    heights = np.asarray(taus, dtype=np.float64)
    if heights.size and heights.min() < MIN_TAU:
        msg = f"tau must be at least {MIN_TAU}, got {heights.min()}"
        raise DomainError(msg)
    T = config.T
    sig = sigmas_for(T, grid)
    scale = normalization(T)

    if config.model == "direct":
        raw = np.array([log_zeta_line(float(tau), sig) for tau in heights])
    elif config.model == "prime_sum":
        if tables.primes is None:
            msg = "prime_sum model needs a prime table"
            raise CapacityError(msg)
        model = DirichletModelConfig.for_height("prime_sum", T, config.x_exponent)
        raw = prime_sum_matrix(sig, heights, model.cutoff, tables.primes)
    else:
        if tables.mollifier is None:
            msg = "selberg_mollified model needs a mollifier table"
            raise CapacityError(msg)
        raw = selberg_sum_matrix(sig, heights, tables.mollifier)

    return [
        ProcessPath(
            T=T,
            tau=float(tau),
            alpha_grid=grid,
            values=np.asarray(row) / scale,
            model=config.model,
            normalization=scale,
        )
        for tau, row in zip(heights, raw.reshape(heights.size, grid.size), strict=True)
    ]


def sample_path(config: RunConfig, tau: float, tables: ModelTables) -> ProcessPath:
    """``Z^(T)`` at height ``tau`` under the configured model."""
    return sample_paths(config, [tau], tables)[0]


def _component(path: Trajectory, component: Component) -> NDArray[np.float64]:
    return np.asarray(path.values.real if component == "real" else path.values.imag)


def _restrict(
    grid: NDArray[np.float64], y: NDArray[np.float64], upper: float
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Cut a piecewise-linear path at ``alpha = upper``."""
    if upper >= grid[-1]:
        return grid, y
    inside = grid < upper
    end = np.interp(upper, grid, y)
    return np.append(grid[inside], upper), np.append(y[inside], end)


def max_statistic(path: Trajectory, cap: float | None = None, component: Component = "real") -> float:
    """Grid maximum of the path, floored by the sigma >= 3/2 cap (``path.cap`` by default)."""
    floor = path.cap if cap is None else cap
    return max(float(np.max(_component(path, component))), floor)


def _nonnegative_measure(grid: NDArray[np.float64], y: NDArray[np.float64]) -> float:
    left, right = y[:-1], y[1:]
    width = np.diff(grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        crossing = width * left / (left - right)
    measure = np.where(
        (left >= 0) & (right >= 0),
        width,
        np.where(
            (left < 0) & (right < 0),
            0.0,
            np.where(left >= 0, crossing, width - crossing),
        ),
    )
    return float(measure.sum())


def arcsine_statistic(path: Trajectory, component: Component = "real") -> float:
    """Fraction of ``alpha in [0, 1]`` where the path is nonnegative.

    The path is linearly interpolated between grid points, so crossings inside an
    interval are located by the linear root. Exact zeros count as nonnegative.
    """
    grid, y = _restrict(path.alpha_grid, _component(path, component), 1.0)
    length = float(grid[-1] - grid[0])
    return min(1.0, max(0.0, _nonnegative_measure(grid, y) / length))


def negative_measure(path: Trajectory, component: Component = "real") -> float:
    """Complement of ``arcsine_statistic``: fraction of ``[0, 1]`` where the path is negative."""
    return 1.0 - arcsine_statistic(path, component)


def log_measure_statistic(path: ProcessPath, component: Component = "real") -> float:
    """``mu_T`` of ``{sigma in [1/log T, 1] : log|zeta(1/2 + sigma + i tau)| >= 0}``.

    ``d mu_T = d sigma / (sigma log log T)``; the path is interpolated linearly in sigma.
    """
    grid, y = _restrict(path.alpha_grid, _component(path, component), 1.0)
    offset = np.log(path.T) ** (-grid)
    hi, lo = offset[:-1], offset[1:]
    left, right = y[:-1], y[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        root = hi + (lo - hi) * left / (left - right)
    lower = np.where(left >= 0, np.where(right >= 0, lo, root), np.where(right >= 0, lo, hi))
    upper = np.where(left >= 0, hi, np.where(right >= 0, root, hi))
    mass = np.log(upper / lower).sum() / math.log(math.log(path.T))
    return min(1.0, max(0.0, float(mass)))


def sign_change_count(path: Trajectory, component: Component = "real") -> int:
    """Number of consecutive grid pairs with strictly opposite signs."""
    y = _component(path, component)
    return int(np.count_nonzero(y[:-1] * y[1:] < 0))


def running_sup(path: Trajectory, component: Component = "real") -> NDArray[np.float64]:
    """``max_{j <= k} |y_j|`` along the grid."""
    return np.maximum.accumulate(np.abs(_component(path, component)))


def occupation_functional(
    path: Trajectory, phi: Phi, t: float, component: Component = "real"
) -> float:
    """Trapezoidal ``integral_0^t phi(Z(u)) du``.

    Raises:
        DomainError: if ``t`` lies beyond the grid
    """
    if t > path.alpha_grid[-1] + 1e-12 or t < 0:
        msg = f"occupation horizon {t} outside the grid [0, {path.alpha_grid[-1]}]"
        raise DomainError(msg)
    grid, y = _restrict(path.alpha_grid, _component(path, component), t)
    weights = np.broadcast_to(np.asarray(phi(y), dtype=np.float64), y.shape)
    return float(trapezoid(weights, grid))


def one(v: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.ones_like(v)


def positive_part_capped(v: NDArray[np.float64]) -> NDArray[np.float64]:
    """``x^+ ^ 1``."""
    return np.minimum(np.maximum(v, 0.0), 1.0)


def negative_part_capped(v: NDArray[np.float64]) -> NDArray[np.float64]:
    """``x^- ^ 1``."""
    return np.minimum(np.maximum(-v, 0.0), 1.0)


PHI_FUNCTIONS: dict[str, Phi] = {
    "one": one,
    "positive_part_capped": positive_part_capped,
    "negative_part_capped": negative_part_capped,
}


def sign_change_witness(path: Trajectory, eta: float, component: Component = "real") -> bool:
    """Both ``<L_eta, x^+ ^ 1>`` and ``<L_eta, x^- ^ 1>`` are positive."""
    return (
        occupation_functional(path, positive_part_capped, eta, component) > 0
        and occupation_functional(path, negative_part_capped, eta, component) > 0
    )


def occupation_histogram(
    path: Trajectory,
    t: float,
    bin_width: float = OCCUPATION_BIN_WIDTH,
    component: Component = "real",
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Occupation measure of the path over ``[0, t]`` binned by value.

    Returns:
        (bin edges, mass per bin); masses add up to ``t``
    """
    grid, y = _restrict(path.alpha_grid, _component(path, component), t)
    midpoints = (y[:-1] + y[1:]) / 2
    low = math.floor(float(midpoints.min()) / bin_width) * bin_width
    high = (math.floor(float(midpoints.max()) / bin_width) + 1) * bin_width
    edges = np.arange(round((high - low) / bin_width) + 1) * bin_width + low
    mass, _ = np.histogram(midpoints, bins=edges, weights=np.diff(grid))
    return edges, mass


def path_statistics(path: Trajectory, t: float = 1.0, component: Component = "real") -> PathStatistics:
    return PathStatistics(
        max_real=max_statistic(path, component=component),
        arcsine_measure=arcsine_statistic(path, component),
        sign_changes=sign_change_count(path, component),
        running_sup=running_sup(path, component),
        occupation=occupation_histogram(path, min(t, float(path.alpha_grid[-1])), component=component),
    )


StatisticKind = Literal["max_with_cap", "arcsine", "occupation", "running_sup", "sign_changes"]


@dataclass(frozen=True)
class StatisticSpec:
    """A scalar path statistic, named so it can cross process boundaries."""

    kind: StatisticKind
    cap: float | None = None
    phi: str = "one"
    t: float = 1.0
    alpha: float | None = None
    component: Component = "real"


def evaluate_statistic(spec: StatisticSpec, path: Trajectory) -> float:
    """Apply ``spec`` to one path."""
    if spec.kind == "max_with_cap":
        return max_statistic(path, spec.cap, spec.component)
    if spec.kind == "arcsine":
        return arcsine_statistic(path, spec.component)
    if spec.kind == "occupation":
        return occupation_functional(path, PHI_FUNCTIONS[spec.phi], spec.t, spec.component)
    if spec.kind == "sign_changes":
        _, y = _restrict(path.alpha_grid, _component(path, spec.component), spec.t)
        return float(np.count_nonzero(y[:-1] * y[1:] < 0))
    sup = running_sup(path, spec.component)
    if spec.alpha is None:
        return float(sup[-1])
    index = int(np.searchsorted(path.alpha_grid, spec.alpha, side="right")) - 1
    return float(sup[max(index, 0)])
