"""Mestre-Nagao sums S(B) per curve and their averages over rank classes."""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .ap_engine import ap_batch
from .dataset import ALLOWED_RANKS
from .errors import EmptyClassError, InvalidArgumentError, OutOfRangeError

# --------------------------------------------------
# --- GRID & STATISTICS CONFIGURATION ---
# --------------------------------------------------
DEFAULT_GRID_START = 3.0
DEFAULT_GRID_RATIO = 1.05
CI_Z = 1.645  # two-sided 90% normal quantile


@dataclass(frozen=True)
class BGrid:
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise InvalidArgumentError("a B grid needs at least one value")
        if values[0] < 3:
            raise InvalidArgumentError(f"grid values must be >= 3, got {values[0]}")
        if np.any(np.diff(values) <= 0):
            raise InvalidArgumentError("grid values must be strictly increasing")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return isinstance(other, BGrid) and np.array_equal(self.values, other.values)

    @property
    def max(self):
        return float(self.values[-1])

    def index_of(self, B):
        """Position of B on the grid, or None."""
        k = int(np.searchsorted(self.values, B))
        if k < len(self.values) and self.values[k] == B:
            return k
        return None

    def with_point(self, B):
        if self.index_of(B) is not None:
            return self
        return BGrid(np.sort(np.append(self.values, float(B))))


def geometric_grid(stop, start=DEFAULT_GRID_START, ratio=DEFAULT_GRID_RATIO, include_stop=True):
    """B_k = start * ratio**k for B_k <= stop; stop itself is appended unless already present."""
    if ratio <= 1:
        raise InvalidArgumentError(f"grid ratio must be > 1, got {ratio}")
    if stop < start:
        raise InvalidArgumentError(f"grid stop {stop} is below its start {start}")
    count = int(math.floor(math.log(stop / start) / math.log(ratio))) + 1
    values = start * ratio ** np.arange(count, dtype=np.float64)
    values = values[values <= stop]
    if include_stop and values[-1] < stop:
        values = np.append(values, float(stop))
    return BGrid(values)


def parse_grid_spec(spec, stop):
    """'GEOM:START:RATIO' (capped at stop) or 'LIST:B1,B2,...'."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().upper()
    try:
        if kind == "GEOM":
            start, ratio = (float(v) for v in rest.split(":"))
            return geometric_grid(stop, start=start, ratio=ratio)
        if kind == "LIST":
            return BGrid(sorted(float(v) for v in rest.split(",") if v.strip()))
    except ValueError:
        raise InvalidArgumentError(f"malformed grid spec: {spec!r}") from None
    raise InvalidArgumentError(f"grid spec must start with GEOM: or LIST:, got {spec!r}")


# --------------------------------------------------
# --- Compensated summation ---
# --------------------------------------------------
def neumaier_prefix(terms, stops):
    """Compensated running sums of terms[:k] for each k in the ascending `stops`."""
    out = np.empty(len(stops), dtype=np.float64)
    s = 0.0
    c = 0.0
    i = 0
    for j, stop in enumerate(stops):
        while i < stop:
            t = float(terms[i])
            total = s + t
            if abs(s) >= abs(t):
                c += (s - total) + t
            else:
                c += (t - total) + s
            s = total
            i += 1
        out[j] = s + c
    return out


def neumaier_sum(terms):
    terms = np.asarray(terms, dtype=np.float64)
    return float(neumaier_prefix(terms, [len(terms)])[0])


# --------------------------------------------------
# --- Traces ---
# --------------------------------------------------
@dataclass(frozen=True)
class SBTrace:
    label: str
    grid: BGrid
    raw: np.ndarray
    values: np.ndarray


def trace_from_ap(label, ap_row, grid):
    """S(B_k) from precomputed a_p; primes p < B_k (strict) contribute."""
    terms = [a * math.log(p) / p for p, a in zip(ap_row.primes.tolist(), ap_row.ap.tolist())]
    stops = np.searchsorted(ap_row.primes, grid.values, side="left")
    raw = neumaier_prefix(terms, stops)
    log_B = np.array([math.log(B) for B in grid.values.tolist()])
    return SBTrace(label=label, grid=grid, raw=raw, values=raw / log_B)


def _check_table(grid, table):
    if grid.max > table.limit:
        raise OutOfRangeError(
            f"grid reaches B={grid.max:g} but the prime table stops at {table.limit}"
        )


def sb_trace(rec, grid, table):
    _check_table(grid, table)
    (row,) = ap_batch([rec], table, limit=int(grid.max))
    return trace_from_ap(rec.label, row, grid)


def sb_traces(records, grid, table, workers=1, ap_rows=None):
    """Traces for many curves; a_p rows can be passed in to skip recomputation."""
    _check_table(grid, table)
    if ap_rows is None:
        ap_rows = ap_batch(records, table, workers=workers, limit=int(grid.max))
    return [trace_from_ap(rec.label, row, grid) for rec, row in zip(records, ap_rows)]


# --------------------------------------------------
# --- Family statistics ---
# --------------------------------------------------
@dataclass(frozen=True)
class FamilyCurve:
    grid: BGrid
    mean: np.ndarray
    half_width: np.ndarray
    n: int


def _family(traces, grid):
    matrix = np.vstack([t.values for t in traces])
    n = matrix.shape[0]
    mean = matrix.mean(axis=0)
    if n == 1:
        half_width = np.zeros_like(mean)
    else:
        half_width = CI_Z * matrix.std(axis=0, ddof=1) / math.sqrt(n)
    return FamilyCurve(grid=grid, mean=mean, half_width=half_width, n=n)


def family_average(traces, ranks, classes=ALLOWED_RANKS):
    """Mean S(B) and 90% CI half-width per grid point, for each rank class."""
    traces = list(traces)
    ranks = list(ranks)
    if len(traces) != len(ranks):
        raise InvalidArgumentError(f"{len(traces)} traces but {len(ranks)} ranks")
    if not traces:
        raise EmptyClassError("no traces to average")
    grid = traces[0].grid
    if any(t.grid != grid for t in traces[1:]):
        raise InvalidArgumentError("all traces must share one B grid")

    families = {}
    for cls in classes:
        members = [t for t, r in zip(traces, ranks) if r == cls]
        if not members:
            raise EmptyClassError(f"rank class {cls} has no curves")
        families[cls] = _family(members, grid)
        logging.debug(f"Rank {cls}: averaged {len(members)} traces")
    return families


def family_frame(families):
    """Figure 1 table: B, mean_rank0, ci0, mean_rank1, ci1."""
    f0, f1 = families[0], families[1]
    return pd.DataFrame(
        {
            "B": f0.grid.values,
            "mean_rank0": f0.mean,
            "ci0": f0.half_width,
            "mean_rank1": f1.mean,
            "ci1": f1.half_width,
        }
    )


def ap_average_profile(records, table, ap_rows=None, workers=1):
    """Per-prime mean a_p over good-reduction curves of each rank (Figure 2 table)."""
    if not records:
        raise InvalidArgumentError("ap_average_profile needs at least one curve")
    if ap_rows is None:
        ap_rows = ap_batch(records, table, workers=workers)

    long = pd.DataFrame(
        {
            "p": np.concatenate([row.primes for row in ap_rows]),
            "rank": np.concatenate(
                [np.full(len(row.primes), rec.rank) for rec, row in zip(records, ap_rows)]
            ),
            "ap": np.concatenate([row.ap for row in ap_rows]).astype(np.float64),
        }
    )
    profile = long.groupby(["p", "rank"])["ap"].mean().unstack("rank")
    profile = profile.reindex(columns=list(ALLOWED_RANKS))
    profile.columns = [f"avg_rank{r}" for r in ALLOWED_RANKS]
    return profile.reset_index()


def score_table(traces, records, B, ap_rows=None):
    """S(B) per curve at one B: columns label, rank, S.

    A B that is not on the traces' grid is added to it, which needs the a_p rows.
    """
    if len(traces) != len(records):
        raise InvalidArgumentError(f"{len(traces)} traces but {len(records)} records")
    if not traces:
        raise EmptyClassError("no curves to score")
    k = traces[0].grid.index_of(B)
    if k is None:
        if ap_rows is None:
            raise OutOfRangeError(f"B={B:g} is not on the grid and no a_p rows were given")
        grid = traces[0].grid.with_point(B)
        traces = [trace_from_ap(t.label, row, grid) for t, row in zip(traces, ap_rows)]
        k = grid.index_of(B)
    return pd.DataFrame(
        {
            "label": [t.label for t in traces],
            "rank": [r.rank for r in records],
            "S": [float(t.values[k]) for t in traces],
        }
    )
