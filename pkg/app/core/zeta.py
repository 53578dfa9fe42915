"""Evaluation of zeta, zeta'/zeta and log zeta on horizontal lines.

Zeta is computed by Euler-Maclaurin summation; log zeta follows the usual branch,
continued along the horizontal segment from sigma = 10 at fixed height. The module
also houses the Dirichlet-sum approximants (prime sum and Selberg's mollified sum)
and the residual ``e_x`` between log zeta and the mollified sum.
"""

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.special
from numpy.typing import ArrayLike, NDArray

from app.core.arith import MollifierTable, PrimeTable
from app.core.errors import CapacityError, DomainError, NearZeroError, PrecisionError

logger = logging.getLogger(__name__)

NEAR_ZERO_THRESHOLD = 1e-8
BRANCH_ORIGIN = 10.0
DEFAULT_STEP = 1e-2
MAX_REFINEMENTS = 30
PRECISION_FLOOR = 1e-15
MAX_TRUNCATION_DOUBLINGS = 6
# Terms per block when summing n^(-s) or Dirichlet polynomials
CHUNK = 8192

ZETA_THREE_HALVES = float(scipy.special.zeta(1.5, 1))

# B_2, B_4, ..., B_12 divided by (2k)!
_BERNOULLI_OVER_FACTORIAL = tuple(
    b / math.factorial(2 * k)
    for k, b in enumerate((1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730), start=1)
)
EM_ORDER = len(_BERNOULLI_OVER_FACTORIAL)

ZetaStatus = Literal["ok", "near_zero", "not_computed"]
DirichletModel = Literal["prime_sum", "selberg_mollified"]
ResidualVariant = Literal["log_form", "logderiv_form"]


@dataclass(frozen=True)
class ZetaPoint:
    """One evaluation of zeta and its horizontal logarithm.

    ``not_computed`` means the logarithm is unavailable: the point lies outside
    ``sigma > 1/2, t >= 2`` (value may still be filled) or outside the domain of
    ``zeta_em`` (value is NaN).
    """

    sigma: float
    t: float
    value: complex
    log_value: complex
    status: ZetaStatus


@dataclass(frozen=True)
class DirichletModelConfig:
    """Which Dirichlet sum approximates log zeta, and its cutoff."""

    model: DirichletModel
    cutoff: float

    def __post_init__(self) -> None:
        if self.cutoff < 2:
            msg = f"Dirichlet model cutoff must be >= 2, got {self.cutoff}"
            raise DomainError(msg)

    @classmethod
    def for_height(cls, model: DirichletModel, T: float, x_exponent: float) -> "DirichletModelConfig":
        """Cutoff ``T`` for the prime sum, ``x^3 = T^(3 x_exponent)`` for the mollified sum."""
        if model == "prime_sum":
            return cls(model=model, cutoff=T)
        return cls(model=model, cutoff=T ** (3 * x_exponent))


def em_truncation(t: float) -> int:
    """Euler-Maclaurin truncation point for height ``t``."""
    return max(20, math.ceil(1.3 * abs(t) / (2 * math.pi)) + 20)


def _correction_terms(s: NDArray[np.complex128], n_terms: int, order: int) -> tuple[
    list[NDArray[np.complex128]], list[NDArray[np.complex128]]
]:
    """Bernoulli corrections ``B_2k/(2k)! s(s+1)...(s+2k-2) N^(-s-2k+1)`` and their s-derivatives."""
    log_n = math.log(n_terms)
    n_pow = np.exp(-s * log_n)
    poly = s.copy()
    dpoly = np.ones_like(s)
    terms: list[NDArray[np.complex128]] = []
    dterms: list[NDArray[np.complex128]] = []
    for k in range(1, order + 1):
        scale = _BERNOULLI_OVER_FACTORIAL[k - 1] * n_pow * float(n_terms) ** (1 - 2 * k)
        terms.append(scale * poly)
        dterms.append(scale * (dpoly - log_n * poly))
        q = (s + 2 * k - 1) * (s + 2 * k)
        dq = 2 * s + 4 * k - 1
        poly, dpoly = poly * q, dpoly * q + poly * dq
    return terms, dterms


def _em_sum(
    sigmas: NDArray[np.float64],
    t: float,
    n_terms: int,
    order: int,
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Euler-Maclaurin zeta and zeta' at ``sigmas + i t`` with truncation ``n_terms``."""
    s = sigmas.astype(np.complex128) + 1j * t
    head = np.zeros(s.shape, dtype=np.complex128)
    dhead = np.zeros(s.shape, dtype=np.complex128)
    for start in range(1, n_terms, CHUNK):
        n = np.arange(start, min(start + CHUNK, n_terms), dtype=np.float64)
        log_n = np.log(n)
        phase = np.exp(-1j * t * log_n)
        magnitude = np.exp(-np.outer(sigmas, log_n))
        head += magnitude @ phase
        dhead -= magnitude @ (phase * log_n)

    log_big = math.log(n_terms)
    n_pow = np.exp(-s * log_big)
    tail = n_terms * n_pow / (s - 1) + n_pow / 2
    dtail = (
        -log_big * n_terms * n_pow / (s - 1)
        - n_terms * n_pow / (s - 1) ** 2
        - log_big * n_pow / 2
    )
    terms, dterms = _correction_terms(s, n_terms, order)
    return head + tail + sum(terms, np.zeros_like(s)), dhead + dtail + sum(dterms, np.zeros_like(s))


def _check_domain(sigma: float, t: float) -> None:
    if sigma <= -1:
        msg = f"zeta evaluation needs sigma > -1, got {sigma}"
        raise DomainError(msg)
    if sigma == 1 and t == 0:
        msg = "zeta has a pole at s = 1"
        raise DomainError(msg)


def zeta_em(sigma: float, t: float, tol: float = 1e-12) -> complex:
    """zeta(sigma + i t) with absolute error about ``tol``.

    The Bernoulli correction depth is the smallest order whose next term falls
    below ``tol``; if no order up to 12 gets there, the truncation point doubles.

    Raises:
        DomainError: at the pole or for sigma <= -1, t < 0
        PrecisionError: when ``tol`` is below double-precision reach
    """
    _check_domain(sigma, t)
    if t < 0:
        msg = f"zeta_em expects t >= 0, got {t}"
        raise DomainError(msg)
    if tol < PRECISION_FLOOR:
        msg = f"tolerance {tol:.1e} is below the double-precision floor {PRECISION_FLOOR:.0e}"
        raise PrecisionError(msg)

    n_terms = em_truncation(t)
    s = np.array([sigma + 1j * t])
    for _ in range(MAX_TRUNCATION_DOUBLINGS):
        terms, _ = _correction_terms(s, n_terms, EM_ORDER)
        magnitudes = [float(abs(term[0])) for term in terms]
        depth = next((k for k, m in enumerate(magnitudes) if m < tol), None)
        if depth is not None:
            value, _ = _em_sum(np.array([sigma]), t, n_terms, min(depth + 1, EM_ORDER))
            return complex(value[0])
        n_terms *= 2
    msg = f"tolerance {tol:.1e} not reached at sigma={sigma}, t={t}"
    raise PrecisionError(msg)


def zeta_em_line(sigmas: ArrayLike, t: float, order: int = EM_ORDER) -> NDArray[np.complex128]:
    """zeta along the horizontal line at height ``t``, one value per sigma."""
    sig = np.atleast_1d(np.asarray(sigmas, dtype=np.float64))
    if np.any(sig <= -1):
        msg = "zeta evaluation needs sigma > -1"
        raise DomainError(msg)
    if t == 0 and np.any(sig == 1):
        msg = "zeta has a pole at s = 1"
        raise DomainError(msg)
    value, _ = _em_sum(sig, abs(t), em_truncation(t), order)
    return value if t >= 0 else np.conj(value)


def log_zeta_line(t: float, sigmas: ArrayLike, step: float = DEFAULT_STEP) -> NDArray[np.complex128]:
    """Horizontal log zeta at height ``t`` for every sigma in ``sigmas``.

    The argument is continued from ``sigma = 10`` (principal value there) down to
    each target through points no further than ``step`` apart; intervals whose
    phase increment reaches pi/2 are bisected until every increment is smaller.
    Each returned imaginary part is the principal argument at the target plus the
    multiple of 2 pi picked by the unwrapped walk, so it does not depend on the
    walk's rounding.

    Raises:
        DomainError: outside ``t >= 2, 1/2 < sigma <= 10``
        NearZeroError: if zeta drops below the near-zero threshold on the walk
    """
    targets = np.atleast_1d(np.asarray(sigmas, dtype=np.float64))
    if t < 2:
        msg = f"horizontal log zeta needs t >= 2, got {t}"
        raise DomainError(msg)
    if np.any(targets <= 0.5) or np.any(targets > BRANCH_ORIGIN):
        msg = "horizontal log zeta needs 1/2 < sigma <= 10"
        raise DomainError(msg)

    lowest = float(targets.min())
    n_steps = max(1, math.ceil((BRANCH_ORIGIN - lowest) / step))
    walk = np.unique(np.concatenate([np.linspace(lowest, BRANCH_ORIGIN, n_steps + 1), targets]))[::-1]
    values = zeta_em_line(walk, t)

    for _ in range(MAX_REFINEMENTS):
        modulus = np.abs(values)
        if modulus.min() < NEAR_ZERO_THRESHOLD:
            k = int(modulus.argmin())
            raise NearZeroError(sigma=float(walk[k]), t=t, modulus=float(modulus[k]))
        increments = np.angle(values[1:] / values[:-1])
        coarse = np.abs(increments) >= math.pi / 2
        if not coarse.any():
            break
        midpoints = (walk[:-1][coarse] + walk[1:][coarse]) / 2
        logger.debug("Bisecting %d walk intervals at t=%s", midpoints.size, t)
        walk = np.concatenate([walk, midpoints])
        values = np.concatenate([values, zeta_em_line(midpoints, t)])
        order = np.argsort(-walk, kind="stable")
        walk, values = walk[order], values[order]
    else:
        msg = f"phase walk did not resolve at t={t} after {MAX_REFINEMENTS} refinements"
        raise PrecisionError(msg)

    walked = np.angle(values[0]) + np.concatenate([[0.0], np.cumsum(increments)])
    ascending = walk[::-1]
    index = walk.size - 1 - np.searchsorted(ascending, targets)
    principal = np.angle(values[index])
    winding = np.round((walked[index] - principal) / (2 * math.pi))
    return np.log(np.abs(values[index])) + 1j * (principal + 2 * math.pi * winding)


def log_zeta_horizontal(t: float, sigma: float, step: float = DEFAULT_STEP) -> complex:
    """log zeta(sigma + i t) on the branch continued horizontally from sigma = 10."""
    return complex(log_zeta_line(t, [sigma], step)[0])


def zeta_point(sigma: float, t: float) -> ZetaPoint:
    """Evaluate zeta and, where defined, its horizontal logarithm, with a status flag."""
    nan = complex(math.nan, math.nan)
    try:
        value = complex(zeta_em_line([sigma], t)[0])
    except DomainError:
        return ZetaPoint(sigma=sigma, t=t, value=nan, log_value=nan, status="not_computed")
    if abs(value) < NEAR_ZERO_THRESHOLD:
        return ZetaPoint(sigma=sigma, t=t, value=value, log_value=nan, status="near_zero")
    if not (0.5 < sigma <= BRANCH_ORIGIN and t >= 2):
        return ZetaPoint(sigma=sigma, t=t, value=value, log_value=nan, status="not_computed")
    try:
        log_value = log_zeta_horizontal(t, sigma)
    except NearZeroError:
        return ZetaPoint(sigma=sigma, t=t, value=value, log_value=nan, status="near_zero")
    return ZetaPoint(sigma=sigma, t=t, value=value, log_value=log_value, status="ok")


def zeta_log_deriv(sigma: float, t: float) -> complex:
    """zeta'/zeta at ``sigma + i t`` from term-wise differentiated Euler-Maclaurin.

    Raises:
        DomainError: for sigma <= 1/2
        NearZeroError: near a zero of zeta
    """
    if sigma <= 0.5:
        msg = f"zeta_log_deriv needs sigma > 1/2, got {sigma}"
        raise DomainError(msg)
    _check_domain(sigma, t)
    value, derivative = _em_sum(np.array([sigma]), abs(t), em_truncation(t), EM_ORDER)
    if abs(value[0]) < NEAR_ZERO_THRESHOLD:
        raise NearZeroError(sigma=sigma, t=t, modulus=float(abs(value[0])))
    ratio = complex(derivative[0] / value[0])
    return ratio if t >= 0 else ratio.conjugate()


def _compensated_sum(terms: NDArray[np.complex128]) -> complex:
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def dirichlet_prime_sum(sigma: float, t: float, cutoff: float, table: PrimeTable) -> complex:
    """Sum of ``p^(-sigma - i t)`` over primes ``p <= cutoff``, compensated, ascending in p.

    Raises:
        CapacityError: if ``table`` does not reach ``cutoff``
    """
    primes = table.primes_upto(cutoff)
    log_p = np.log(primes.astype(np.float64))
    return _compensated_sum(np.exp(-sigma * log_p) * np.exp(-1j * t * log_p))


def selberg_log_sum(sigma: float, t: float, mollifier: MollifierTable) -> complex:
    """Sum of ``Lambda_x(n) / (n^(sigma + i t) log n)`` over the mollifier table."""
    log_n = mollifier.log_n
    terms = mollifier.weights / log_n * np.exp(-sigma * log_n) * np.exp(-1j * t * log_n)
    return _compensated_sum(terms)


def dirichlet_sum_matrix(
    log_n: NDArray[np.float64],
    coefficients: NDArray[np.float64],
    sigmas: ArrayLike,
    taus: ArrayLike,
) -> NDArray[np.complex128]:
    """``out[b, k] = sum_n c_n n^(-sigma_k) e^(-i tau_b log n)`` for many heights at once.

    Terms are summed in blocks of ``CHUNK`` ascending n; block partials are combined
    with Kahan compensation. Each entry only depends on its own (sigma, tau) and the
    block layout, never on the other rows.
    """
    sig = np.atleast_1d(np.asarray(sigmas, dtype=np.float64))
    tau = np.atleast_1d(np.asarray(taus, dtype=np.float64))
    total = np.zeros((tau.size, sig.size), dtype=np.complex128)
    carry = np.zeros_like(total)
    for start in range(0, log_n.size, CHUNK):
        block = log_n[start : start + CHUNK]
        weights = coefficients[start : start + CHUNK] * np.exp(-np.outer(sig, block))
        angle = np.outer(tau, block)
        partial = np.cos(angle) @ weights.T - 1j * (np.sin(angle) @ weights.T)
        corrected = partial - carry
        running = total + corrected
        carry = (running - total) - corrected
        total = running
    return total


def prime_sum_matrix(
    sigmas: ArrayLike, taus: ArrayLike, cutoff: float, table: PrimeTable
) -> NDArray[np.complex128]:
    """Batched ``dirichlet_prime_sum`` over heights (rows) and abscissae (columns)."""
    primes = table.primes_upto(cutoff)
    log_p = np.log(primes.astype(np.float64))
    return dirichlet_sum_matrix(log_p, np.ones_like(log_p), sigmas, taus)


def selberg_sum_matrix(
    sigmas: ArrayLike, taus: ArrayLike, mollifier: MollifierTable
) -> NDArray[np.complex128]:
    """Batched ``selberg_log_sum`` over heights (rows) and abscissae (columns)."""
    log_n = mollifier.log_n
    return dirichlet_sum_matrix(log_n, mollifier.weights / log_n, sigmas, taus)


def ex_residual(
    sigma: float,
    t: float,
    mollifier: MollifierTable,
    variant: ResidualVariant = "log_form",
) -> complex:
    """Residual between zeta and Selberg's mollified Dirichlet sum.

    ``log_form`` is log zeta minus the sum of ``Lambda_x(n) / (n^s log n)``;
    ``logderiv_form`` is zeta'/zeta plus the sum of ``Lambda_x(n) / n^s``.

    Raises:
        DomainError: for sigma <= 1/2
        NearZeroError: propagated from the zeta evaluation
    """
    if sigma <= 0.5:
        msg = f"e_x residual needs sigma > 1/2, got {sigma}"
        raise DomainError(msg)
    if variant == "log_form":
        return log_zeta_horizontal(t, sigma) - selberg_log_sum(sigma, t, mollifier)
    log_n = mollifier.log_n
    terms = mollifier.weights * np.exp(-sigma * log_n) * np.exp(-1j * t * log_n)
    return zeta_log_deriv(sigma, t) + _compensated_sum(terms)
