import random

import numpy as np
import pytest

from conftest import brute_force_ap
from murmur_rank.ap_engine import (
    P_SMALL,
    ReducedCurve,
    ap_batch,
    ap_bsgs,
    ap_naive,
    ap_value,
    quadratic_character,
    reduce_curve,
    sqrt_mod,
)
from murmur_rank.dataset import CurveRecord
from murmur_rank.errors import BadReductionError, CurveValidationError, InvalidArgumentError
from murmur_rank.primes import sieve

CURVE_11A1 = CurveRecord("11a1", 0, -1, 1, -10, -20, 11, 0)
KNOWN_11A1 = {2: -2, 3: -1, 5: 1, 7: -2, 13: 4, 17: -2, 19: 0, 23: -1, 29: 0, 31: 7, 37: 3}


def random_short_curve(p, rng):
    while True:
        A, B = rng.randrange(p), rng.randrange(p)
        if (4 * A**3 + 27 * B * B) % p:
            return ReducedCurve.short(p, A, B)


def test_known_traces_of_11a1():
    for p, expected in KNOWN_11A1.items():
        assert ap_value(reduce_curve(CURVE_11A1, p)) == expected


def test_sample_matches_point_enumeration(sample_records):
    for rec in sample_records:
        for p in [2, 3, 5, 7, 11, 13, 29, 53]:
            red = reduce_curve(rec, p)
            if red.is_good:
                assert ap_naive(red) == brute_force_ap(rec.ainvs, p), (rec.label, p)


def test_bad_prime_is_rejected():
    red = reduce_curve(CURVE_11A1, 11)
    assert not red.is_good
    with pytest.raises(BadReductionError):
        ap_naive(red)
    with pytest.raises(BadReductionError):
        ap_bsgs(red)


def test_non_minimal_model_detected():
    # 11a1 scaled by u = 5: a_i -> 5^i a_i, still with conductor 11
    scaled = CurveRecord("11a1x5", 0, -25, 125, -6250, -312500, 11, 0).validate()
    with pytest.raises(CurveValidationError, match="not minimal"):
        reduce_curve(scaled, 5)


def test_x3_plus_x_at_three():
    red = ReducedCurve(p=3, status="good", ainvs=(0, 0, 0, 1, 0))
    assert ap_naive(red) == 0


def test_supersingular_x3_plus_1():
    # y^2 = x^3 + 1 has a_p = 0 for p = 2 mod 3, on both paths
    primes = [p for p in sieve(3_000).primes.tolist() if p > 3 and p % 3 == 2]
    for p in primes:
        red = ReducedCurve.short(p, 0, 1)
        assert ap_value(red) == 0
        if p > P_SMALL:
            assert ap_naive(red) == 0


def test_hasse_bound_on_random_pairs():
    rng = random.Random(7)
    primes = [p for p in sieve(2_000).primes.tolist() if p > 3]
    for _ in range(10_000):
        p = rng.choice(primes)
        a = ap_naive(random_short_curve(p, rng))
        assert a * a <= 4 * p


def test_bsgs_agrees_with_naive_on_random_curves():
    rng = random.Random(2024)
    primes = [p for p in sieve(10_000).primes.tolist() if p > P_SMALL]
    for _ in range(100):
        for p in rng.sample(primes, 5):
            red = random_short_curve(p, rng)
            assert ap_bsgs(red) == ap_naive(red), (p, red.A, red.B)


def test_bsgs_agrees_with_naive_at_every_prime():
    rng = random.Random(11)
    primes = [p for p in sieve(10_000).primes.tolist() if p > P_SMALL]
    for p in primes:
        red = random_short_curve(p, rng)
        assert ap_bsgs(red) == ap_naive(red), (p, red.A, red.B)


def test_bsgs_is_deterministic():
    red = ReducedCurve.short(9_973, 12, 345)
    assert ap_bsgs(red) == ap_bsgs(red)


def test_bsgs_needs_large_prime():
    with pytest.raises(InvalidArgumentError):
        ap_bsgs(ReducedCurve.short(P_SMALL, 1, 1))


def test_quadratic_twist_negates_trace():
    rng = random.Random(3)
    for p in [p for p in sieve(500).primes.tolist() if p > 3]:
        d = next(d for d in range(2, p) if pow(d, (p - 1) // 2, p) == p - 1)
        for _ in range(5):
            red = random_short_curve(p, rng)
            assert ap_naive(red.quadratic_twist(d)) == -ap_naive(red)


def test_quadratic_character_table():
    chi = quadratic_character(11)
    assert chi[0] == 0
    assert sorted(np.flatnonzero(chi == 1).tolist()) == [1, 3, 4, 5, 9]
    assert int(chi.sum()) == 0


@pytest.mark.parametrize("p", [13, 17, 41, 97, 10_009, 65_537])
def test_sqrt_mod(p):
    for n in range(1, 60):
        if pow(n, (p - 1) // 2, p) == 1:
            r = sqrt_mod(n, p)
            assert r * r % p == n % p


def test_batch_rows(sample_records, table_10k):
    rows = ap_batch(sample_records[:3], table_10k, limit=40)
    assert [r.label for r in rows] == ["11a1", "14a1", "15a1"]
    assert rows[0].as_dict() == KNOWN_11A1
    assert 2 not in rows[1].primes and 7 not in rows[1].primes


def test_batch_independent_of_workers(sample_records, table_10k):
    serial = ap_batch(sample_records, table_10k, workers=1, limit=2_000)
    pooled = ap_batch(sample_records, table_10k, workers=2, limit=2_000)
    for a, b in zip(serial, pooled):
        assert a.label == b.label
        np.testing.assert_array_equal(a.primes, b.primes)
        np.testing.assert_array_equal(a.ap, b.ap)


def test_batch_limit_beyond_table(sample_records, table_10k):
    with pytest.raises(InvalidArgumentError):
        ap_batch(sample_records, table_10k, limit=20_000)
