import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, "src"))

from murmur_rank.dataset import load_curves  # noqa: E402
from murmur_rank.density import euler_constants  # noqa: E402
from murmur_rank.primes import sieve  # noqa: E402

SAMPLE_CSV = os.path.join(ROOT, "data", "curves_sample.csv")


def brute_force_ap(ainvs, p):
    """p + 1 - #E(F_p) by enumerating every (x, y) on the long model."""
    a1, a2, a3, a4, a6 = ainvs
    count = 1
    for x in range(p):
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % p == 0:
                count += 1
    return p + 1 - count


@pytest.fixture(scope="session")
def sample_records():
    return load_curves(SAMPLE_CSV)


@pytest.fixture(scope="session")
def table_10k():
    return sieve(10_000)


@pytest.fixture(scope="session")
def table_100k():
    return sieve(100_000)


@pytest.fixture(scope="session")
def consts():
    return euler_constants(1_000_000)
