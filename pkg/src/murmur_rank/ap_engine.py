"""Frobenius traces a_p = p + 1 - #E(F_p) at good primes.

Two paths compute the same number:

* ``ap_naive`` sums the quadratic character over F_p (or enumerates points for
  p = 2, 3). Cost O(p), with the table of squares shared by every curve at p.
* ``ap_bsgs`` finds #E(F_p) in the Hasse interval by baby-step giant-step on
  random points of E and of its quadratic twist. Cost O(p^(1/4)) group
  operations per point; valid for p > P_SMALL, where a point with a unique
  multiple in the interval is guaranteed to exist on E or on the twist.

``ap_batch`` dispatches between the two over a (curve, prime) grid.
"""

import hashlib
import logging
import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BadReductionError,
    CurveValidationError,
    HasseBoundError,
    InvalidArgumentError,
    NumericalFailure,
)
from .parallel_runner import run_parallel
from .primes import prime_factors

# --------------------------------------------------
# --- ENGINE CONFIGURATION ---
# --------------------------------------------------
P_SMALL = 229  # ap_naive for p <= P_SMALL, ap_bsgs above
MAX_BSGS_POINTS = 64  # random points tried before falling back to ap_naive
CURVES_PER_CHUNK = 16  # unit of work handed to a pool worker
SQUARES_CACHE_SIZE = 512

GOOD = "good"
BAD = "bad"


@dataclass(frozen=True)
class ReducedCurve:
    """A curve reduced mod p.

    For p > 3 the model is short, y^2 = x^3 + A x + B; for p in {2, 3} the
    long Weierstrass coefficients are kept in `ainvs`.
    """

    p: int
    status: str
    A: int = None
    B: int = None
    ainvs: tuple = None

    @property
    def is_good(self):
        return self.status == GOOD

    @classmethod
    def short(cls, p, A, B):
        """Good reduction y^2 = x^3 + A x + B over F_p, p > 3."""
        if p <= 3:
            raise InvalidArgumentError(f"short models need p > 3, got p={p}")
        A, B = A % p, B % p
        if (4 * A**3 + 27 * B * B) % p == 0:
            raise InvalidArgumentError(f"singular short model A={A}, B={B} mod {p}")
        return cls(p=p, status=GOOD, A=A, B=B)

    def quadratic_twist(self, d):
        """Twist by d: y^2 = x^3 + d^2 A x + d^3 B (a non-residue d gives the nontrivial twist)."""
        if self.A is None:
            raise InvalidArgumentError("twists are only formed for short models (p > 3)")
        return ReducedCurve.short(self.p, d * d * self.A, d**3 * self.B)


def reduce_curve(rec, p):
    """Reduce a validated CurveRecord modulo the prime p."""
    status = BAD if rec.conductor % p == 0 else GOOD

    if p <= 3:
        ainvs = tuple(a % p for a in rec.ainvs)
        if status == GOOD and rec.discriminant % p == 0:
            raise CurveValidationError(f"model is not minimal at p={p}", rec.label)
        return ReducedCurve(p=p, status=status, ainvs=ainvs)

    # Complete the square and the cube: y^2 = x^3 - 27 c4 x - 54 c6.
    c4, c6 = rec.c_invariants
    A = (-27 * c4) % p
    B = (-54 * c6) % p
    if status == GOOD and (4 * A**3 + 27 * B * B) % p == 0:
        raise CurveValidationError(f"model is not minimal at p={p}", rec.label)
    return ReducedCurve(p=p, status=status, A=A, B=B)


def _check_hasse(a, p):
    if a * a > 4 * p:
        raise HasseBoundError(f"a_p={a} violates the Hasse bound", {"p": p})
    return a


@lru_cache(maxsize=SQUARES_CACHE_SIZE)
def quadratic_character(p):
    """chi[v] for v in 0..p-1: 1 on nonzero squares, -1 on non-squares, chi[0] = 0."""
    xs = np.arange(p, dtype=np.int64)
    chi = np.full(p, -1, dtype=np.int64)
    chi[(xs * xs) % p] = 1
    chi[0] = 0
    chi.flags.writeable = False
    return chi


def _count_long_form(ainvs, p):
    a1, a2, a3, a4, a6 = ainvs
    count = 1  # point at infinity
    for x in range(p):
        rhs = x**3 + a2 * x * x + a4 * x + a6
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - rhs) % p == 0:
                count += 1
    return count


def ap_naive(red):
    if not red.is_good:
        raise BadReductionError(f"a_p requested at bad prime p={red.p}")
    p = red.p
    if p <= 3:
        a = p + 1 - _count_long_form(red.ainvs, p)
    else:
        chi = quadratic_character(p)
        xs = np.arange(p, dtype=np.int64)
        values = ((xs * xs % p) * xs + red.A * xs + red.B) % p
        a = -int(chi[values].sum())
    return _check_hasse(a, p)


# --------------------------------------------------
# --- Group law on y^2 = x^3 + a x + b over F_p ---
# --------------------------------------------------
# Points are (x, y) tuples; None is the point at infinity.
def _neg(P, p):
    if P is None:
        return None
    return (P[0], (-P[1]) % p)


def _add(P, Q, a, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        m = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        m = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (m * m - x1 - x2) % p
    return (x3, (m * (x1 - x3) - y1) % p)


def _mul(k, P, a, p):
    if k < 0:
        return _neg(_mul(-k, P, a, p), p)
    result = None
    addend = P
    while k:
        if k & 1:
            result = _add(result, addend, a, p)
        addend = _add(addend, addend, a, p)
        k >>= 1
    return result


def sqrt_mod(n, p):
    """Square root of a quadratic residue n mod an odd prime p (Tonelli-Shanks)."""
    n %= p
    if n == 0:
        return 0
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)

    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1

    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def _random_point(a, b, p, rng):
    while True:
        x = rng.randrange(p)
        rhs = (x * x * x + a * x + b) % p
        if rhs == 0:
            return (x, 0)
        if pow(rhs, (p - 1) // 2, p) == 1:
            return (x, sqrt_mod(rhs, p))


def _multiples_in_interval(P, a, p, lo, hi):
    """All n in [lo, hi] with n*P = O, by baby-step giant-step."""
    width = hi - lo
    m = math.isqrt(width) + 1

    baby = {}
    R = None
    for j in range(m):
        baby.setdefault(R, []).append(j)
        R = _add(R, P, a, p)

    step = _mul(m, P, a, p)
    G = _mul(lo, P, a, p)
    found = []
    for i in range(width // m + 1):
        for j in baby.get(_neg(G, p), ()):
            k = i * m + j
            if k <= width:
                found.append(lo + k)
        G = _add(G, step, a, p)
    return sorted(found)


def _point_order(P, multiple, a, p):
    order = multiple
    for q in prime_factors(multiple):
        while order % q == 0 and _mul(order // q, P, a, p) is None:
            order //= q
    return order


def _smallest_nonresidue(p):
    d = 2
    while pow(d, (p - 1) // 2, p) != p - 1:
        d += 1
    return d


def _bsgs_seed(red):
    digest = hashlib.sha256(f"{red.A},{red.B},{red.p}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def ap_bsgs(red):
    if not red.is_good:
        raise BadReductionError(f"a_p requested at bad prime p={red.p}")
    p = red.p
    if p <= P_SMALL:
        raise InvalidArgumentError(f"ap_bsgs needs p > {P_SMALL}, got p={p}")

    half_width = math.isqrt(4 * p)
    lo, hi = p + 1 - half_width, p + 1 + half_width
    twist = red.quadratic_twist(_smallest_nonresidue(p))
    rng = random.Random(_bsgs_seed(red))

    # #E = n and #E' = 2p + 2 - n; both lie in [lo, hi].
    lcm_curve, lcm_twist = 1, 1
    for attempt in range(MAX_BSGS_POINTS):
        on_twist = attempt % 2 == 1
        a, b = (twist.A, twist.B) if on_twist else (red.A, red.B)
        P = _random_point(a, b, p, rng)
        multiples = _multiples_in_interval(P, a, p, lo, hi)
        if not multiples:
            raise NumericalFailure(
                "no multiple of a point order in the Hasse interval",
                {"p": p, "A": red.A, "B": red.B},
            )
        order = _point_order(P, multiples[0], a, p)
        if on_twist:
            lcm_twist = math.lcm(lcm_twist, order)
        else:
            lcm_curve = math.lcm(lcm_curve, order)

        first = -(-lo // lcm_curve) * lcm_curve
        candidates = [
            n for n in range(first, hi + 1, lcm_curve) if (2 * p + 2 - n) % lcm_twist == 0
        ]
        if len(candidates) == 1:
            return _check_hasse(p + 1 - candidates[0], p)
        if not candidates:
            raise NumericalFailure(
                "curve and twist orders are inconsistent",
                {"p": p, "lcm_curve": lcm_curve, "lcm_twist": lcm_twist},
            )

    logging.warning(
        f"BSGS did not isolate #E after {MAX_BSGS_POINTS} points at p={p}; using the character sum"
    )
    return ap_naive(red)


def ap_value(red):
    """a_p by the path appropriate for red.p."""
    return ap_naive(red) if red.p <= P_SMALL else ap_bsgs(red)


# --------------------------------------------------
# --- Batch over (curve, prime) grids ---
# --------------------------------------------------
@dataclass(frozen=True)
class ApRow:
    """a_p of one curve at all of its good primes up to a limit."""

    label: str
    primes: np.ndarray
    ap: np.ndarray

    def as_dict(self):
        return dict(zip(self.primes.tolist(), self.ap.tolist()))


def _ap_chunk(args):
    """Prime-major loop over one chunk of curves (module-level for pickling)."""
    records, primes = args
    values = [[] for _ in records]
    goods = [[] for _ in records]
    for p in primes.tolist():
        for k, rec in enumerate(records):
            red = reduce_curve(rec, p)
            if not red.is_good:
                continue
            goods[k].append(p)
            values[k].append(ap_value(red))
    return [
        ApRow(
            label=rec.label,
            primes=np.asarray(goods[k], dtype=np.int64),
            ap=np.asarray(values[k], dtype=np.int64),
        )
        for k, rec in enumerate(records)
    ]


def ap_batch(records, table, workers=1, limit=None):
    """a_p at every good prime <= limit (default: table.limit) for each curve.

    Rows come back in input order whatever the worker count.
    """
    limit = table.limit if limit is None else limit
    if limit > table.limit:
        raise InvalidArgumentError(f"limit {limit} exceeds the prime table ({table.limit})")
    primes = table.primes[table.primes <= limit]

    chunks = [
        (records[i : i + CURVES_PER_CHUNK], primes)
        for i in range(0, len(records), CURVES_PER_CHUNK)
    ]
    logging.info(
        f"Computing a_p for {len(records)} curves at {len(primes)} primes "
        f"({len(chunks)} chunks, {workers} workers)"
    )
    rows = []
    for chunk_rows in run_parallel(_ap_chunk, chunks, workers=workers, label="ap_batch"):
        rows.extend(chunk_rows)
    return rows
