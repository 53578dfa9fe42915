"""Prime sieving, the von Mangoldt function and Selberg's mollified weights."""

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from app.core.errors import CapacityError, DomainError

logger = logging.getLogger(__name__)

SIEVE_CAPACITY = 2**40
# Odd numbers per sieve segment
SEGMENT_ODD_COUNT = 1 << 22

MollifierNormalization = Literal["selberg", "literal"]


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit``, ascending."""

    limit: int
    primes: NDArray[np.int64]

    @property
    def prime_count(self) -> int:
        return int(self.primes.size)

    def primes_upto(self, cutoff: float) -> NDArray[np.int64]:
        """Primes ``p <= cutoff``.

        Raises:
            CapacityError: if the table does not reach ``cutoff``
        """
        if math.floor(cutoff) > self.limit:
            msg = f"prime table limit {self.limit} is below cutoff {cutoff}"
            raise CapacityError(msg)
        return self.primes[: int(np.searchsorted(self.primes, math.floor(cutoff), side="right"))]


@dataclass(frozen=True)
class MollifierTable:
    """Prime powers ``n <= x^3`` with their positive weights ``Lambda_x(n)``."""

    x: float
    n: NDArray[np.int64]
    weights: NDArray[np.float64]
    normalization: MollifierNormalization = "selberg"

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(k), float(w)) for k, w in zip(self.n, self.weights, strict=True)]

    @property
    def log_n(self) -> NDArray[np.float64]:
        return np.log(self.n.astype(np.float64))


def _simple_sieve(limit: int) -> NDArray[np.int64]:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve(limit: int) -> PrimeTable:
    """Segmented, odd-only sieve of Eratosthenes.

    Args:
        limit: inclusive upper bound, ``0 <= limit <= 2**40``

    Returns:
        PrimeTable with every prime up to ``limit``

    Raises:
        DomainError: for a negative limit
        CapacityError: above the segmented-sieve bound
    """
    if limit < 0:
        msg = f"sieve limit must be nonnegative, got {limit}"
        raise DomainError(msg)
    if limit > SIEVE_CAPACITY:
        msg = f"sieve limit {limit} exceeds capacity 2**40"
        raise CapacityError(msg)
    if limit < 2:
        return PrimeTable(limit=limit, primes=np.empty(0, dtype=np.int64))

    base = [int(p) for p in _simple_sieve(math.isqrt(limit))[1:]]
    chunks = [np.array([2], dtype=np.int64)]
    low = 3
    while low <= limit:
        high = min(low + 2 * SEGMENT_ODD_COUNT, limit + 1)  # exclusive
        mask = np.ones((high - low + 1) // 2, dtype=bool)
        for p in base:
            if p * p >= high:
                break
            start = max(p * p, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start < high:
                mask[(start - low) // 2 :: p] = False
        chunks.append(low + 2 * np.flatnonzero(mask).astype(np.int64))
        low = high if high % 2 == 1 else high + 1

    primes = np.concatenate(chunks)
    logger.debug("Sieved %d primes up to %d", primes.size, limit)
    return PrimeTable(limit=limit, primes=primes)


def von_mangoldt(n: int) -> float:
    """``log p`` if ``n = p^k`` for a prime ``p`` and ``k >= 1``, else 0."""
    if n < 1:
        msg = f"von Mangoldt function needs n >= 1, got {n}"
        raise DomainError(msg)
    if n == 1:
        return 0.0
    p = n
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            p = d
            break
    m = n
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


def prime_powers(limit: float, table: PrimeTable) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Every prime power ``n <= limit`` with its base prime, sorted by ``n``."""
    primes = table.primes_upto(limit)
    bound = math.floor(limit)
    ns = [primes]
    bases = [primes]
    k = 2
    while 2**k <= bound:
        root = int(round(bound ** (1.0 / k))) + 1
        candidates = primes[: int(np.searchsorted(primes, root, side="right"))]
        powers = candidates**k
        keep = powers <= bound
        ns.append(powers[keep])
        bases.append(candidates[keep])
        k += 1
    n = np.concatenate(ns)
    p = np.concatenate(bases)
    order = np.argsort(n, kind="stable")
    return n[order], p[order]


def mollifier_factor(
    u: NDArray[np.float64] | float,
    x: float,
    normalization: MollifierNormalization = "selberg",
) -> NDArray[np.float64]:
    """``Lambda_x(n) / Lambda(n)`` evaluated at real ``u``.

    ``selberg`` divides the mollified branches by ``2 log^2 x`` (continuous at x and x^2,
    zero at x^3); ``literal`` divides by ``log^2 u``.
    """
    u = np.asarray(u, dtype=np.float64)
    log_x = math.log(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_u = np.log(u)
        outer = (3 * log_x - log_u) ** 2
        middle = outer - 2 * (2 * log_x - log_u) ** 2
        denominator = 2 * log_x**2 if normalization == "selberg" else log_u**2
        factor = np.select(
            [u <= x, u <= x**2, u <= x**3],
            [np.ones_like(u), middle / denominator, outer / denominator],
            default=0.0,
        )
    return np.maximum(factor, 0.0)


def lambda_x(n: int, x: float, normalization: MollifierNormalization = "selberg") -> float:
    """Selberg's mollified von Mangoldt weight ``Lambda_x(n)``."""
    if x <= 1:
        msg = f"mollifier cutoff must exceed 1, got {x}"
        raise DomainError(msg)
    lam = von_mangoldt(n)
    if lam == 0.0:
        return 0.0
    return lam * float(mollifier_factor(float(n), x, normalization))


def build_mollifier(
    x: float,
    table: PrimeTable | None = None,
    normalization: MollifierNormalization = "selberg",
) -> MollifierTable:
    """Tabulate every prime power ``n <= x^3`` with ``Lambda_x(n) > 0``.

    Raises:
        DomainError: for ``x <= 2``
        CapacityError: when ``x^3`` exceeds the sieve capacity or the supplied table
    """
    if x <= 2:
        msg = f"mollifier table needs x > 2, got {x}"
        raise DomainError(msg)
    limit = math.floor(x**3)
    if limit > SIEVE_CAPACITY:
        msg = f"x^3 = {x**3:.3e} exceeds sieve capacity"
        raise CapacityError(msg)
    if table is None:
        table = sieve(limit)
    n, p = prime_powers(limit, table)
    weights = np.log(p.astype(np.float64)) * mollifier_factor(n.astype(np.float64), x, normalization)
    keep = weights > 0
    logger.debug("Mollifier table for x=%s holds %d prime powers", x, int(keep.sum()))
    return MollifierTable(x=x, n=n[keep], weights=weights[keep], normalization=normalization)


def mollifier_branch_mismatch(
    x: float, normalization: MollifierNormalization = "selberg"
) -> tuple[float, float, float]:
    """Branch mismatch relative to ``Lambda`` at the real breakpoints.

    Returns:
        (|inner - middle| at u = x, |middle - outer| at u = x^2, |outer| at u = x^3)
    """
    log_x = math.log(x)

    def middle(log_u: float) -> float:
        denominator = 2 * log_x**2 if normalization == "selberg" else log_u**2
        return ((3 * log_x - log_u) ** 2 - 2 * (2 * log_x - log_u) ** 2) / denominator

    def outer(log_u: float) -> float:
        denominator = 2 * log_x**2 if normalization == "selberg" else log_u**2
        return (3 * log_x - log_u) ** 2 / denominator

    return (
        abs(1.0 - middle(log_x)),
        abs(middle(2 * log_x) - outer(2 * log_x)),
        abs(outer(3 * log_x)),
    )
