"""Empirical distributions, KS distances, complex covariance and the numeric lemma checks."""

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from app.core.arith import MollifierNormalization, PrimeTable, mollifier_factor, prime_powers
from app.core.errors import DomainError
from app.core.random_streams import Stream, make_rng
from app.core.zeta import dirichlet_sum_matrix
from app.models.schemas import Lemma22Report

logger = logging.getLogger(__name__)

# Heights per Monte Carlo stream in fourth_moment_check
MONTE_CARLO_CHUNK = 1000
HYPOTHESIS_TOLERANCE = 1e-12

Cdf = Callable[[NDArray[np.float64]], ArrayLike]


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample with its right-continuous ECDF."""

    samples: NDArray[np.float64]

    @classmethod
    def from_samples(cls, samples: ArrayLike) -> "EmpiricalDistribution":
        values = np.sort(np.asarray(samples, dtype=np.float64).ravel())
        if values.size == 0:
            msg = "an empirical distribution needs at least one sample"
            raise DomainError(msg)
        if np.isnan(values).any():
            msg = "samples contain NaN"
            raise DomainError(msg)
        return cls(samples=values)

    @property
    def n(self) -> int:
        return int(self.samples.size)

    def cdf(self, x: ArrayLike) -> NDArray[np.float64]:
        return np.searchsorted(self.samples, x, side="right") / self.n

    def cdf_left(self, x: ArrayLike) -> NDArray[np.float64]:
        """``P(X < x)``."""
        return np.searchsorted(self.samples, x, side="left") / self.n

    def quantile(self, q: float) -> float:
        """Smallest sample ``s`` with ``cdf(s) >= q``."""
        if not 0 <= q <= 1:
            msg = f"quantile level must lie in [0, 1], got {q}"
            raise DomainError(msg)
        index = max(math.ceil(q * self.n) - 1, 0)
        return float(self.samples[index])


def _evaluate(cdf: Cdf, points: NDArray[np.float64]) -> NDArray[np.float64]:
    values = np.asarray(cdf(points), dtype=np.float64)
    if values.shape != points.shape:
        values = np.array([float(np.asarray(cdf(np.asarray(p)))) for p in points])
    return values


def ks_one_sample(
    dist: EmpiricalDistribution, cdf: Cdf, cdf_left: Cdf | None = None
) -> float:
    """Kolmogorov-Smirnov distance between the ECDF and a reference law.

    Both one-sided gaps are taken at every jump: ``|F_n(x) - F(x)|`` and
    ``|F_n(x-) - F(x-)|``, with ``F(x-)`` from ``cdf_left`` (``cdf`` by default).
    """
    points = np.unique(dist.samples)
    upper = np.abs(dist.cdf(points) - _evaluate(cdf, points))
    lower = np.abs(dist.cdf_left(points) - _evaluate(cdf_left or cdf, points))
    return float(max(upper.max(), lower.max()))


def ks_two_sample(a: EmpiricalDistribution, b: EmpiricalDistribution) -> float:
    """Sup-norm distance of two ECDFs, scanned over the merged sample points."""
    points = np.union1d(a.samples, b.samples)
    return float(np.abs(a.cdf(points) - b.cdf(points)).max())


@dataclass(frozen=True)
class CovarianceEstimate:
    """``E[conj(X) Y] - E[conj(X)] E[Y]`` per alpha pair, with jackknife standard errors."""

    alphas: NDArray[np.float64]
    matrix: NDArray[np.complex128]
    n_samples: int
    standard_errors: NDArray[np.float64]


def _covariance(samples: NDArray[np.complex128]) -> NDArray[np.complex128]:
    centred = samples - samples.mean(axis=0)
    matrix = centred.conj().T @ centred / samples.shape[0]
    return (matrix + matrix.conj().T) / 2


def complex_covariance(samples: ArrayLike, alphas: Sequence[float]) -> CovarianceEstimate:
    """Sample covariance of complex vectors (rows are samples).

    Raises:
        DomainError: for fewer than 2 samples or a length mismatch with ``alphas``
    """
    data = np.asarray(samples, dtype=np.complex128)
    if data.ndim != 2 or data.shape[0] < 2:
        msg = "complex covariance needs at least 2 sample vectors"
        raise DomainError(msg)
    if data.shape[1] != len(alphas):
        msg = f"sample vectors have length {data.shape[1]}, expected {len(alphas)}"
        raise DomainError(msg)
    m = data.shape[0]
    matrix = _covariance(data)

    # leave-one-out estimates from the running sums, one (k x k) slice per sample
    total = data.sum(axis=0)
    outer = data.conj().T @ data
    rest_mean = (total[None, :] - data) / (m - 1)
    rest_outer = (outer[None, :, :] - np.einsum("li,lj->lij", data.conj(), data)) / (m - 1)
    loo = rest_outer - np.einsum("li,lj->lij", rest_mean.conj(), rest_mean)
    loo = (loo + np.conj(np.swapaxes(loo, 1, 2))) / 2
    spread = np.abs(loo - loo.mean(axis=0)) ** 2
    errors = np.sqrt((m - 1) / m * spread.sum(axis=0))

    return CovarianceEstimate(
        alphas=np.asarray(alphas, dtype=np.float64),
        matrix=matrix,
        n_samples=m,
        standard_errors=errors,
    )


def _etas(alpha: float, beta: float, T: float) -> tuple[float, float]:
    log_t = math.log(T)
    return log_t ** (-alpha), log_t ** (-beta)


def lemma33_check(alpha: float, beta: float, x: float, T: float, table: PrimeTable) -> float:
    """``sum_{p <= x^3} (p^(-1-eta) - p^(-1-eta'))`` over ``(beta - alpha) log log T``.

    The numerator is never positive since ``eta >= eta'``; ``alpha == beta`` gives 0.

    Raises:
        DomainError: unless ``0 <= alpha <= beta <= 1``
        CapacityError: if ``table`` stops below ``x^3``
    """
    if not 0 <= alpha <= beta <= 1:
        msg = f"need 0 <= alpha <= beta <= 1, got alpha={alpha}, beta={beta}"
        raise DomainError(msg)
    primes = table.primes_upto(x**3)
    if alpha == beta:
        return 0.0
    eta, eta_prime = _etas(alpha, beta, T)
    log_p = np.log(primes.astype(np.float64))
    terms = np.exp(-(1 + eta_prime) * log_p) * np.expm1(-(eta - eta_prime) * log_p)
    return math.fsum(terms) / ((beta - alpha) * math.log(math.log(T)))


def eta_gap_check(alpha: float, beta: float, T: float) -> float:
    """``(eta - eta') / (eta (beta - alpha) log log T)``; at most 1, with limit 1 as beta -> alpha."""
    if not 0 <= alpha <= beta:
        msg = f"need 0 <= alpha <= beta, got alpha={alpha}, beta={beta}"
        raise DomainError(msg)
    gap = (beta - alpha) * math.log(math.log(T))
    if gap == 0:
        return 1.0
    return -math.expm1(-gap) / gap


@dataclass(frozen=True)
class MeanValueCheck:
    numeric_integral: float
    main_term: float
    delta: float
    mass: float

    @property
    def normalized_error(self) -> float:
        """``|numeric - main| delta / sum |a_k|^2``; relative error when delta is infinite."""
        if self.mass == 0:
            return 0.0
        error = abs(self.numeric_integral - self.main_term)
        if math.isinf(self.delta):
            return error / self.main_term
        return error * self.delta / self.mass


def mv_mean_value_check(
    lambdas: Sequence[float], alphas: Sequence[complex], T: float
) -> MeanValueCheck:
    """Exact ``integral_0^T |sum_k a_k e^(i lambda_k t)|^2 dt`` against ``T sum |a_k|^2``.

    Cross terms use ``integral_0^T e^(i d t) dt = sin(dT)/d + 2i sin^2(dT/2)/d``.

    Raises:
        DomainError: for repeated frequencies or mismatched lengths
    """
    freq = np.asarray(lambdas, dtype=np.float64)
    coeff = np.asarray(alphas, dtype=np.complex128)
    if freq.shape != coeff.shape:
        msg = "frequencies and coefficients must have the same length"
        raise DomainError(msg)
    ordered = np.sort(freq)
    gaps = np.diff(ordered)
    if np.any(gaps == 0):
        msg = "frequencies must be distinct"
        raise DomainError(msg)
    delta = float(gaps.min()) if gaps.size else math.inf

    d = freq[None, :] - freq[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.where(
            d == 0,
            T,
            (np.sin(d * T) + 2j * np.sin(d * T / 2) ** 2) / d,
        )
    numeric = float(np.real(coeff.conj() @ kernel @ coeff))
    mass = float(np.sum(np.abs(coeff) ** 2))
    return MeanValueCheck(numeric_integral=numeric, main_term=T * mass, delta=delta, mass=mass)


@dataclass(frozen=True)
class FourthMomentCheck:
    estimate: float
    bound: float
    diagonal: float
    standard_error: float
    n_samples: int

    @property
    def ratio(self) -> float:
        return self.estimate / self.bound if self.bound > 0 else 0.0


def _base_prime(n: int) -> int | None:
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            m = n
            while m % p == 0:
                m //= p
            return p if m == 1 else None
    return n if n > 1 else None


def _diagonal(phi: Mapping[int, float]) -> float:
    """``sum_l Phi(l)^2 / l`` with ``Phi(l) = sum_{mn = l} phi(m) phi(n)``."""
    convolution: dict[int, float] = {}
    items = list(phi.items())
    for m, a in items:
        for n, b in items:
            convolution[m * n] = convolution.get(m * n, 0.0) + a * b
    return math.fsum(value**2 / ell for ell, value in convolution.items())


def fourth_moment_check(
    phi: Mapping[int, float], x: float, T: float, n_samples: int, seed: int
) -> FourthMomentCheck:
    """Monte Carlo ``E|sum_n phi(n) n^(-1/2 - i tau)|^4`` for ``tau`` uniform on ``[0, T]``.

    Chunk ``k`` of heights comes from stream ``(seed, MONTE_CARLO, k)``.

    Raises:
        DomainError: when ``phi`` is negative, supported off the prime powers up to
            ``x^3``, or has ``phi(p^i) > phi(p)``
    """
    support = {int(n): float(v) for n, v in phi.items() if v != 0}
    bases: dict[int, int] = {}
    for n, value in support.items():
        base = _base_prime(n)
        if base is None or n > x**3:
            msg = f"phi must be supported on prime powers up to x^3, got n={n}"
            raise DomainError(msg)
        if value < 0:
            msg = f"phi must be nonnegative, got phi({n})={value}"
            raise DomainError(msg)
        bases[n] = base
    for n, base in bases.items():
        if support[n] > support.get(base, 0.0) * (1 + HYPOTHESIS_TOLERANCE):
            msg = f"phi({n}) exceeds phi({base})"
            raise DomainError(msg)

    bound = math.fsum(v**2 / n for n, v in support.items() if bases[n] == n) ** 2
    if not support or n_samples == 0:
        return FourthMomentCheck(0.0, bound, _diagonal(support), 0.0, n_samples)

    ns = np.array(sorted(support), dtype=np.float64)
    coefficients = np.array([support[int(n)] for n in ns])
    log_n = np.log(ns)
    draws = []
    for chunk, start in enumerate(range(0, n_samples, MONTE_CARLO_CHUNK)):
        rng = make_rng(seed, Stream.MONTE_CARLO, chunk)
        taus = rng.uniform(0.0, T, size=min(MONTE_CARLO_CHUNK, n_samples - start))
        sums = dirichlet_sum_matrix(log_n, coefficients, [0.5], taus)[:, 0]
        draws.append(np.abs(sums) ** 4)
    fourth = np.concatenate(draws)
    error = float(fourth.std(ddof=1) / math.sqrt(fourth.size)) if fourth.size > 1 else 0.0
    return FourthMomentCheck(
        estimate=float(fourth.mean()),
        bound=bound,
        diagonal=_diagonal(support),
        standard_error=error,
        n_samples=n_samples,
    )


def increment_weights(
    a: float,
    b: float,
    T: float,
    table: PrimeTable,
    x_exponent: float = 1 / 20,
    normalization: MollifierNormalization = "selberg",
) -> dict[int, float]:
    """``|Lambda_x(n)/log n * (n^(-eta_a) - n^(-eta_b))|`` on prime powers up to ``x^3``.

    ``x = T^x_exponent`` and ``eta_c = (log T)^(-c)``.
    """
    if not 0 <= a <= b <= 1:
        msg = f"need 0 <= a <= b <= 1, got a={a}, b={b}"
        raise DomainError(msg)
    x = T**x_exponent
    n, p = prime_powers(x**3, table)
    u = n.astype(np.float64)
    log_n = np.log(u)
    eta_a, eta_b = _etas(a, b, T)
    # Lambda_x(n) / log n = mollifier_factor(n) * log p / log n
    weights = (
        mollifier_factor(u, x, normalization)
        * np.log(p.astype(np.float64))
        / log_n
        * np.abs(np.exp(-eta_b * log_n) * np.expm1(-(eta_a - eta_b) * log_n))
    )
    return {int(k): float(w) for k, w in zip(n, weights, strict=True) if w > 0}


def lemma22_hypotheses_check(alphas: Sequence[float], T: float, table: PrimeTable) -> Lemma22Report:
    """Finite-T view of the coefficients ``a_p = 1_{p <= T} sum_l p^(-sigma_l) / sqrt(log log T)``.

    Raises:
        CapacityError: if ``table`` stops below ``T``
    """
    levels = np.asarray(alphas, dtype=np.float64)
    if levels.size == 0 or np.any((levels < 0) | (levels > 1)):
        msg = f"alphas must be a nonempty list in [0, 1], got {list(alphas)}"
        raise DomainError(msg)
    primes = table.primes_upto(T).astype(np.float64)
    log_p = np.log(primes)
    log_log_t = math.log(math.log(T))
    sigmas = 0.5 + math.log(T) ** (-levels)

    coefficients = np.exp(-np.outer(log_p, sigmas)).sum(axis=1) / math.sqrt(log_log_t)
    squares = coefficients**2
    m_t = T ** (1 / log_log_t)
    tail = primes > m_t
    total = math.fsum(squares)
    tail_sum = math.fsum(squares[tail])

    pair_ratios: list[list[float | None]] = []
    for s_i, a_i in zip(sigmas, levels, strict=True):
        row: list[float | None] = []
        for s_j, a_j in zip(sigmas, levels, strict=True):
            scale = min(1.0, a_i, a_j) * log_log_t
            value = math.fsum(np.exp(-(s_i + s_j) * log_p))
            row.append(value / scale if scale > 0 else None)
        pair_ratios.append(row)

    top = int(np.argmax(np.abs(coefficients))) if coefficients.size else 0
    return Lemma22Report(
        T=T,
        alphas=levels.tolist(),
        sup_coefficient=float(np.abs(coefficients).max(initial=0.0)),
        sup_prime=int(primes[top]) if primes.size else 0,
        sum_squares=total,
        m_T=m_t,
        tail_sum=tail_sum,
        weighted_tail_sum=math.fsum(squares[tail] * (1 + primes[tail] / T)),
        tail_fraction=tail_sum / total if total > 0 else 0.0,
        pair_ratios=pair_ratios,
    )
