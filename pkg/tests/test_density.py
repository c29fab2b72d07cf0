import math
import random

import numpy as np
import pytest

from murmur_rank.density import c_factor, density_M, euler_constants
from murmur_rank.errors import InvalidArgumentError, ToleranceError
from murmur_rank.primes import sieve


def test_first_limit_constant(consts):
    assert consts.A**2 / math.pi**2 == pytest.approx(0.14261, abs=5e-5)


def test_second_maximum_bound(consts):
    A, B = consts.A, consts.B
    s = A * A + 4 * B * B
    bound = (s + math.sqrt(s * s - 2 * math.pi**2 * B * B)) / math.pi**2
    assert bound == pytest.approx(0.76881, abs=5e-5)


def test_constant_invariants(consts):
    assert consts.A > 1
    assert 0 < consts.B < 1
    assert consts.D2 > 0
    assert consts.C1 == consts.D2 * consts.A
    assert consts.C2 == consts.D2 * consts.B
    assert consts.C3 == consts.D2 * math.pi
    assert consts.error_bound == 2.0 / 1_000_000


def test_products_converge_monotonically():
    table = sieve(200_000)
    small, mid, large = (euler_constants(P, table=table) for P in (10_000, 100_000, 200_000))
    assert small.A < mid.A < large.A
    assert small.D2 < mid.D2 < large.D2
    assert small.B > mid.B > large.B


def test_doubling_truncation_moves_A_very_little():
    table = sieve(200_000)
    a = euler_constants(100_000, table=table).A
    b = euler_constants(200_000, table=table).A
    assert abs(a - b) < 1e-6


def test_including_two_adds_one_factor():
    odd = euler_constants(10_000)
    full = euler_constants(10_000, first_prime=2)
    assert full.A / odd.A == pytest.approx(11 / 9, rel=1e-13)
    assert full.B / odd.B == pytest.approx(7 / 9, rel=1e-13)


def test_truncation_preconditions():
    with pytest.raises(InvalidArgumentError):
        euler_constants(50)
    with pytest.raises(ToleranceError) as info:
        euler_constants(1_000, tol=1e-6)
    assert info.value.diagnostics["P"] == 1_000
    assert euler_constants(1_000, tol=1e-2).P == 1_000


def test_c_factor_values():
    assert c_factor(1) == 1.0
    assert c_factor(2) == pytest.approx(11 / 7)
    assert c_factor(4) == c_factor(2)
    assert c_factor(3) == pytest.approx(1 + 9 / 61)
    with pytest.raises(InvalidArgumentError):
        c_factor(0)


def test_c_factor_multiplicative():
    rng = random.Random(17)
    checked = 0
    while checked < 1_000:
        m, n = rng.randint(1, 5_000), rng.randint(1, 5_000)
        if math.gcd(m, n) != 1:
            continue
        assert c_factor(m * n) == pytest.approx(c_factor(m) * c_factor(n), rel=1e-12)
        checked += 1


def test_density_special_values(consts):
    assert density_M(0.0, consts) == 0.0
    assert density_M(0.1, consts) == pytest.approx(consts.C1 * math.sqrt(0.1) - 0.1 * consts.C3)
    expected = consts.C1 + consts.C2 * math.sqrt(3) - consts.C3
    assert density_M(1.0, consts) == pytest.approx(expected)


def test_density_continuous_at_quarter(consts):
    at = density_M(0.25, consts)
    for eps in (1e-4, 1e-8, 1e-12):
        assert abs(density_M(0.25 - eps, consts) - at) < 20 * math.sqrt(eps)
        assert abs(density_M(0.25 + eps, consts) - at) < 20 * math.sqrt(eps)


def test_density_sign_change_at_first_limit(consts):
    y0 = consts.A**2 / math.pi**2
    ys = np.linspace(1e-4, y0 * (1 - 1e-6), 500)
    assert np.all(density_M(ys, consts) > 0)
    assert density_M(y0 * (1 + 1e-3), consts) < 0


def test_density_vectorised_matches_scalar(consts):
    ys = np.array([0.0, 0.05, 0.3, 0.7, 1.3, 2.2])
    values = density_M(ys, consts)
    for y, v in zip(ys, values):
        assert v == pytest.approx(density_M(float(y), consts), rel=1e-14, abs=1e-14)


def test_density_domain(consts):
    with pytest.raises(InvalidArgumentError):
        density_M(-0.1, consts)
