import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, OutOfRangeError

# --------------------------------------------------
# --- SIEVE CONFIGURATION ---
# --------------------------------------------------
# Odd numbers per segment. One byte each, so a segment stays inside L2.
SEGMENT_ODD_COUNT = 1 << 18


@dataclass(frozen=True)
class PrimeTable:
    """All primes <= limit and the running sums of log p (Chebyshev theta)."""

    limit: int
    primes: np.ndarray
    theta_prefix: np.ndarray

    def __len__(self):
        return len(self.primes)

    def primes_below(self, bound):
        """Primes p < bound (strict), as a view."""
        return self.primes[: np.searchsorted(self.primes, bound, side="left")]


def _base_primes(limit):
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime)


def sieve(limit):
    """Segmented odd-only sieve of Eratosthenes up to and including limit."""
    if limit < 2:
        raise InvalidArgumentError(f"sieve limit must be >= 2, got {limit}")
    limit = int(limit)

    base = _base_primes(math.isqrt(limit) + 1)
    chunks = [np.array([2], dtype=np.int64)]

    span = 2 * SEGMENT_ODD_COUNT
    low = 3
    while low <= limit:
        high = min(low + span, limit + 1)  # exclusive
        odd_count = (high - low + 1) // 2
        mask = np.ones(odd_count, dtype=bool)

        for p in base[1:]:
            p = int(p)
            p2 = p * p
            if p2 >= high:
                break
            start = max(p2, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start >= high:
                continue
            mask[(start - low) // 2 :: p] = False

        idx = np.flatnonzero(mask)
        if idx.size:
            chunks.append(low + 2 * idx.astype(np.int64))
        low = high

    primes = np.concatenate(chunks)
    primes = primes[primes <= limit]
    theta_prefix = np.cumsum(np.log(primes.astype(np.float64)))

    logging.debug(f"Sieved {len(primes)} primes up to {limit}")
    primes.flags.writeable = False
    theta_prefix.flags.writeable = False
    return PrimeTable(limit=limit, primes=primes, theta_prefix=theta_prefix)


def theta(x, table):
    """Chebyshev theta(x) = sum of log p over p <= x."""
    if x > table.limit:
        raise OutOfRangeError(f"theta({x}) needs primes beyond the table limit {table.limit}")
    if x < 2:
        raise InvalidArgumentError(f"theta is evaluated for x >= 2, got {x}")
    k = int(np.searchsorted(table.primes, x, side="right")) - 1
    return float(table.theta_prefix[k])


def prime_factors(n):
    """Distinct prime factors of |n| by trial division, ascending."""
    n = abs(int(n))
    if n == 0:
        raise InvalidArgumentError("0 has no finite factorization")
    factors = []
    if n % 2 == 0:
        factors.append(2)
        while n % 2 == 0:
            n //= 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 2
    if n > 1:
        factors.append(n)
    return factors
