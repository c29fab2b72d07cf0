"""The averaged Mestre-Nagao function f(x), its main terms and their maxima.

f(x) sums the murmuration density over primes p < xN. On 0 < x < 1/4 its main
term is g1; on 1/4 <= x < 1 the density picks up the r = 1 summand and the
main term becomes g2. Both are smooth, so their interior maxima are located by
golden-section search followed by bisection on the sign of a central
difference.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .density import density_M
from .errors import InvalidArgumentError, NumericalFailure, OutOfRangeError
from .nagao import neumaier_prefix

# --------------------------------------------------
# --- SEARCH CONFIGURATION ---
# --------------------------------------------------
MIN_CONDUCTOR_SCALE = 100
DEFAULT_MAXIMA_TOL = 1e-8
DEFAULT_LAMBDA_TOL = 1e-12
BRANCH1_START = 0.01
BRANCH_SPLIT = 0.25
BRANCH2_END = 1.0 - 1e-9
SCAN_POINTS = 2001
GOLDEN_WIDTH = 1e-6
MAX_BISECTIONS = 200

LAMBDA_START = 0.25 + 1e-6
LAMBDA_END = 1.0
LAMBDA_SCAN_POINTS = 2000

FIGURE3_POINTS = 2000
FIGURE3_RANGE = (0.005, 1.0)

# Empirical maxima need the family grid to span [0.01, 2] * N_ref.
EMPIRICAL_LOW = 0.01
EMPIRICAL_HIGH = 2.0
DEFAULT_SMOOTHING_WINDOW = 5

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2


@dataclass(frozen=True)
class MainTermModel:
    N: float
    consts: object

    def __post_init__(self):
        if self.N < MIN_CONDUCTOR_SCALE:
            raise InvalidArgumentError(f"N must be >= {MIN_CONDUCTOR_SCALE}, got {self.N}")


@dataclass(frozen=True)
class MaximaReport:
    N: float
    x1: float
    x2: float
    g1_value: float
    g2_value: float
    first_bound: float
    second_bound: float
    lam: float
    tol: float

    def as_row(self):
        return {"N": self.N, "x1": self.x1, "x2": self.x2}


# --------------------------------------------------
# --- Main terms ---
# --------------------------------------------------
def _numerator(x, N, c):
    """Numerator of g1/g2; the C2 terms vanish identically for x <= 1/4."""
    x = np.asarray(x, dtype=np.float64)
    u = np.sqrt(np.clip(4 * x - 1, 0.0, None))
    return (
        2 * c.C1 * np.sqrt(x)
        + 2 * c.C2 * u
        - 2 * c.C2 * np.arctan(u)
        - c.C3 * x
        - c.C1 * math.sqrt(2) / math.sqrt(N)
    )


def _main_term(x, N, c):
    x = np.asarray(x, dtype=np.float64)
    return _numerator(x, N, c) / np.log(x * N)


def _scalar(value):
    return float(value) if np.ndim(value) == 0 else value


def main_term_g1(x, model):
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr <= 0) or np.any(x_arr >= BRANCH_SPLIT):
        raise InvalidArgumentError("g1 is defined for 0 < x < 1/4")
    if np.any(x_arr * model.N <= 1):
        raise InvalidArgumentError("g1 needs xN > 1")
    return _scalar(_main_term(x_arr, model.N, model.consts))


def main_term_g2(x, model):
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr < BRANCH_SPLIT) or np.any(x_arr >= 1):
        raise InvalidArgumentError("g2 is defined for 1/4 <= x < 1")
    return _scalar(_main_term(x_arr, model.N, model.consts))


def main_term(x, model):
    """g1 below 1/4, g2 from 1/4 on; scalar or array."""
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr <= 0) or np.any(x_arr >= 1) or np.any(x_arr * model.N <= 1):
        raise InvalidArgumentError("main terms are defined for 0 < x < 1 with xN > 1")
    return _scalar(_main_term(x_arr, model.N, model.consts))


def first_maximum_equation(x, model):
    """x * num'(x) * log(xN) - num(x) for g1; zero at a critical point."""
    c, N = model.consts, model.N
    deriv = c.C1 / math.sqrt(x) - c.C3
    return x * deriv * math.log(x * N) - float(_numerator(x, N, c))


def second_maximum_equation(x, model):
    """Same stationarity residual for g2 (x > 1/4)."""
    if x <= BRANCH_SPLIT:
        raise InvalidArgumentError("the second-branch equation needs x > 1/4")
    c, N = model.consts, model.N
    root = math.sqrt(4 * x - 1)
    deriv = c.C1 / math.sqrt(x) - c.C3 + 4 * c.C2 / root - c.C2 / (x * root)
    return x * deriv * math.log(x * N) - float(_numerator(x, N, c))


# --------------------------------------------------
# --- Maxima of the main terms ---
# --------------------------------------------------
def _interior_peak(xs, values):
    """Index of the largest interior local maximum of a sampled curve, or None."""
    v = np.asarray(values)
    if v.size < 3:
        return None
    inner = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
    if inner.size == 0:
        return None
    return int(inner[np.argmax(v[inner])])


def _golden_max(f, a, b, width):
    c = a + INV_PHI_SQUARE * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc > fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI_SQUARE * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return a, b


def _central_difference(f, x):
    h = math.sqrt(np.finfo(float).eps) * x
    return (f(x + h) - f(x - h)) / (2 * h)


def _refine_max(f, a, b, tol):
    """Bisection on the sign of f' inside a bracket with f'(a) > 0 > f'(b)."""
    if not (_central_difference(f, a) > 0 > _central_difference(f, b)):
        return (a + b) / 2
    for _ in range(MAX_BISECTIONS):
        if b - a <= tol:
            break
        mid = (a + b) / 2
        if _central_difference(f, mid) > 0:
            a = mid
        else:
            b = mid
    return (a + b) / 2


def _branch_maximum(f, lo, hi, tol, branch, N):
    xs = np.linspace(lo, hi, SCAN_POINTS)
    values = np.array([f(x) for x in xs])
    k = _interior_peak(xs, values)
    if k is None:
        raise NumericalFailure(
            "no interior maximum bracketed",
            {"branch": branch, "N": N, "lo": lo, "hi": hi, "edge_values": (values[0], values[-1])},
        )
    a, b = _golden_max(f, xs[k - 1], xs[k + 1], max(tol, GOLDEN_WIDTH))
    return _refine_max(f, a, b, tol)


def local_maxima(model, tol=DEFAULT_MAXIMA_TOL):
    if tol <= 0:
        raise InvalidArgumentError(f"tolerance must be positive, got {tol}")
    N, c = model.N, model.consts

    def g(x):
        return float(_main_term(x, N, c))

    lo1 = max(BRANCH1_START, 2.0 / N)
    x1 = _branch_maximum(g, lo1, BRANCH_SPLIT - 1e-9, tol, 1, N)
    x2 = _branch_maximum(g, BRANCH_SPLIT, BRANCH2_END, tol, 2, N)

    first, second, lam = limit_constants(c)
    if x1 > first or x2 > second:
        logging.warning(f"N={N:g}: maxima ({x1:.6f}, {x2:.6f}) exceed the limiting bounds")
    return MaximaReport(
        N=N,
        x1=x1,
        x2=x2,
        g1_value=g(x1),
        g2_value=g(x2),
        first_bound=first,
        second_bound=second,
        lam=lam,
        tol=tol,
    )


# --------------------------------------------------
# --- Limits as N grows ---
# --------------------------------------------------
def lambda_residual(lam, consts):
    A, B = consts.A, consts.B
    root = math.sqrt(max(4 * lam - 1, 0.0))
    return A * math.sqrt((4 * lam - 1) * lam) + 4 * B * lam - math.pi * lam * root - B


def solve_lambda(consts, tol=DEFAULT_LAMBDA_TOL):
    """Interior root of the lambda equation where the residual turns from + to -.

    The residual vanishes trivially at 1/4 and has one more root just above it,
    where it turns from - to +; both are stepped over.
    """
    if tol <= 0:
        raise InvalidArgumentError(f"tolerance must be positive, got {tol}")
    grid = np.linspace(LAMBDA_START, LAMBDA_END, LAMBDA_SCAN_POINTS)
    values = [lambda_residual(lam, consts) for lam in grid]

    bracket = None
    for k in range(len(grid) - 1):
        if values[k] > 0 >= values[k + 1]:
            bracket = (grid[k], grid[k + 1])
            break
    if bracket is None:
        raise NumericalFailure(
            "lambda equation has no + to - sign change",
            {"start": LAMBDA_START, "end": LAMBDA_END, "A": consts.A, "B": consts.B},
        )

    a, b = bracket
    mid = (a + b) / 2
    for _ in range(MAX_BISECTIONS):
        mid = (a + b) / 2
        value = lambda_residual(mid, consts)
        if abs(value) <= tol:
            return mid
        if value > 0:
            a = mid
        else:
            b = mid
        if b - a <= 4 * np.finfo(float).eps:
            break

    value = lambda_residual(mid, consts)
    if abs(value) <= tol:
        return mid
    raise NumericalFailure("lambda bisection stalled", {"lam": mid, "residual": value, "tol": tol})


def limit_constants(consts):
    """(A^2/pi^2, bound on the second maximum, lambda)."""
    A, B = consts.A, consts.B
    first = A * A / math.pi**2
    s = A * A + 4 * B * B
    second = (s + math.sqrt(s * s - 2 * math.pi**2 * B * B)) / math.pi**2
    return first, second, solve_lambda(consts)


# --------------------------------------------------
# --- f(x) from the primes ---
# --------------------------------------------------
def f_sweep(xs, N, consts, table):
    """f(x) = (1/log xN) * sum_{p < xN} M(p/N) log p / p for every x in xs."""
    xs = np.asarray(xs, dtype=np.float64)
    bounds = xs * N
    if np.any(bounds < 3):
        raise InvalidArgumentError("f(x) needs xN >= 3")
    if np.any(bounds > table.limit):
        raise OutOfRangeError(
            f"f(x) reaches xN={bounds.max():g} beyond the prime table limit {table.limit}"
        )

    primes = table.primes[table.primes < bounds.max()]
    p = primes.astype(np.float64)
    terms = density_M(p / N, consts) * np.log(p) / p

    order = np.argsort(bounds, kind="stable")
    stops = np.searchsorted(primes, bounds[order], side="left")
    raw = np.empty_like(bounds)
    raw[order] = neumaier_prefix(terms, stops)
    return raw / np.log(bounds)


def f_exact(x, N, consts, table):
    return float(f_sweep([x], N, consts, table)[0])


def figure3_xs(points=FIGURE3_POINTS, x_range=FIGURE3_RANGE):
    """Uniform points strictly inside the open range."""
    return np.linspace(x_range[0], x_range[1], points + 2)[1:-1]


def figure3_frame(N, consts, table, xs=None):
    """x, f_exact(x) and the main term on the same grid."""
    xs = figure3_xs() if xs is None else np.asarray(xs, dtype=np.float64)
    model = MainTermModel(N, consts)
    return pd.DataFrame(
        {"x": xs, "f_exact": f_sweep(xs, N, consts, table), "main_term": main_term(xs, model)}
    )


def sweep_maxima(xs, values, split=BRANCH_SPLIT):
    """Largest interior local maximum of a sampled curve on each side of `split`."""
    xs = np.asarray(xs, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    found = []
    for mask in (xs < split, xs >= split):
        k = _interior_peak(xs[mask], values[mask])
        found.append(None if k is None else float(xs[mask][k]))
    return tuple(found)


# --------------------------------------------------
# --- Maxima of observed families ---
# --------------------------------------------------
def empirical_maxima(family, N_ref, window=DEFAULT_SMOOTHING_WINDOW):
    """Local maxima of a family curve, as x = B / N_ref in increasing order.

    `family` is a FamilyCurve, or a {rank: FamilyCurve} mapping, in which case
    the rank-0-minus-rank-1 mean difference is used. The curve is smoothed by a
    centred moving average over `window` grid points first (window=1: none).
    """
    if isinstance(family, dict):
        grid = family[0].grid
        curve = family[0].mean - family[1].mean
    else:
        grid = family.grid
        curve = family.mean
    if window < 1:
        raise InvalidArgumentError(f"smoothing window must be >= 1, got {window}")

    B = grid.values
    if B[0] > EMPIRICAL_LOW * N_ref or B[-1] < EMPIRICAL_HIGH * N_ref:
        raise OutOfRangeError(
            f"grid [{B[0]:g}, {B[-1]:g}] does not cover "
            f"[{EMPIRICAL_LOW * N_ref:g}, {EMPIRICAL_HIGH * N_ref:g}]"
        )

    smooth = pd.Series(curve).rolling(window, center=True, min_periods=1).mean().to_numpy()
    peaks = np.flatnonzero((smooth[1:-1] > smooth[:-2]) & (smooth[1:-1] >= smooth[2:])) + 1
    return [float(B[k] / N_ref) for k in peaks]
