"""Weight-2 murmuration density M(y) and the Euler-product constants behind it."""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError, ToleranceError
from .primes import prime_factors, sieve

# --------------------------------------------------
# --- CONSTANTS CONFIGURATION ---
# --------------------------------------------------
DEFAULT_TRUNCATION = 1_000_000
MIN_TRUNCATION = 100
DEFAULT_FIRST_PRIME = 3  # products over odd primes


@dataclass(frozen=True)
class MurmurationConstants:
    A: float
    B: float
    D2: float
    P: int
    first_prime: int
    error_bound: float
    C1: float = field(init=False)
    C2: float = field(init=False)
    C3: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "C1", self.D2 * self.A)
        object.__setattr__(self, "C2", self.D2 * self.B)
        object.__setattr__(self, "C3", self.D2 * math.pi)


def euler_constants(P=DEFAULT_TRUNCATION, first_prime=DEFAULT_FIRST_PRIME, tol=None, table=None):
    """A, B and D2 as Euler products over first_prime <= p <= P.

    Every factor is 1 + O(1/p^2), so |log(tail)| <= 2/P for each product;
    that bound is recorded and compared against `tol` when one is given.
    """
    if P < MIN_TRUNCATION:
        raise InvalidArgumentError(f"truncation P must be >= {MIN_TRUNCATION}, got {P}")
    if first_prime not in (2, 3):
        raise InvalidArgumentError(f"first_prime must be 2 or 3, got {first_prime}")

    error_bound = 2.0 / P
    if tol is not None and error_bound > tol:
        raise ToleranceError(
            "truncation too small for the requested tolerance",
            {"P": P, "bound": error_bound, "tol": tol},
        )

    if table is None or table.limit < P:
        table = sieve(P)
    primes = table.primes[(table.primes >= first_prime) & (table.primes <= P)]
    p = primes.astype(np.float64)

    log_A = math.fsum(np.log1p(p / ((p + 1) ** 2 * (p - 1))))
    # (p^4 - 2p^2 - p + 1) / (p^2 - 1)^2 = 1 - p / (p^2 - 1)^2
    log_B = math.fsum(np.log1p(-p / (p * p - 1) ** 2))
    log_D = math.fsum(np.log1p(-1.0 / (p * p + p)))

    consts = MurmurationConstants(
        A=math.exp(log_A),
        B=math.exp(log_B),
        D2=12.0 / (math.pi * math.exp(log_D)),
        P=int(P),
        first_prime=first_prime,
        error_bound=error_bound,
    )
    logging.debug(
        f"Euler constants over {len(primes)} primes up to {P}: "
        f"A={consts.A:.10f}, B={consts.B:.10f}, D2={consts.D2:.10f}"
    )
    return consts


@lru_cache(maxsize=4096)
def c_factor(r):
    """c(r) = prod over p | r of (1 + p^2 / (p^4 - 2p^2 - p + 1))."""
    if r < 1:
        raise InvalidArgumentError(f"c(r) is defined for r >= 1, got {r}")
    value = 1.0
    for p in prime_factors(r):
        value *= 1.0 + p * p / (p**4 - 2 * p * p - p + 1)
    return value


def density_M(y, consts):
    """M(y) = C1 sqrt(y) + C2 sum_{1<=r<=2 sqrt(y)} c(r) sqrt(4y - r^2) - C3 y.

    Accepts a scalar or an array; the r-sum is empty for y < 1/4.
    """
    scalar = np.isscalar(y)
    y = np.asarray(y, dtype=np.float64)
    if np.any(y < 0):
        raise InvalidArgumentError("M(y) is defined for y >= 0")

    total = consts.C1 * np.sqrt(y) - consts.C3 * y
    r_max = int(math.floor(2 * math.sqrt(float(y.max())))) if y.size else 0
    for r in range(1, r_max + 1):
        total = total + consts.C2 * c_factor(r) * np.sqrt(np.clip(4 * y - r * r, 0.0, None))
    return float(total) if scalar else total
