import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from .errors import DegenerateInputError, EmptyClassError, InvalidArgumentError, OutOfRangeError
from .fx import empirical_maxima
from .nagao import family_average, score_table
from .reports import WINDOW_COLUMNS

# --------------------------------------------------
# --- HISTOGRAM CONFIGURATION ---
# --------------------------------------------------
HISTOGRAM_BINS = 12
HISTOGRAM_BAR_WIDTH = 20


@dataclass(frozen=True)
class ClassifierReport:
    """Rank 0 is predicted iff S > cutoff."""

    B: float
    cutoff: float
    accuracy: float
    tp0: int
    fp0: int
    tp1: int
    fp1: int
    n0: int
    n1: int

    def as_row(self):
        return asdict(self)

    def format_table(self):
        lines = [
            "=" * 60,
            f"B = {self.B:g}   cutoff C = {self.cutoff:.6f}   accuracy = {self.accuracy:.2%}",
            "=" * 60,
            f"{'':>14} | {'true rank 0':>12} | {'true rank 1':>12}",
            f"{'predicted 0':>14} | {self.tp0:>12} | {self.fp0:>12}",
            f"{'predicted 1':>14} | {self.fp1:>12} | {self.tp1:>12}",
            f"{'total':>14} | {self.n0:>12} | {self.n1:>12}",
        ]
        return "\n".join(lines)


def _as_arrays(scores):
    if isinstance(scores, pd.DataFrame):
        S = scores["S"].to_numpy(dtype=np.float64)
        ranks = scores["rank"].to_numpy(dtype=np.int64)
    else:
        pairs = list(scores)
        S = np.array([s for s, _ in pairs], dtype=np.float64)
        ranks = np.array([r for _, r in pairs], dtype=np.int64)
    if S.size == 0:
        raise InvalidArgumentError("no scores to classify")
    if not np.all(np.isin(ranks, (0, 1))):
        raise InvalidArgumentError("ranks must be 0 or 1")
    return S, ranks


def evaluate_cutoff(scores, C, B=float("nan")):
    """Confusion counts for the rule: rank 0 iff S > C, rank 1 iff S <= C.

    `scores` is a sequence of (S, rank) pairs or a frame with S and rank columns.
    """
    S, ranks = _as_arrays(scores)
    return _report(S, ranks, C, B)


def _report(S, ranks, C, B):
    pred0 = S > C
    is0 = ranks == 0
    tp0 = int(np.sum(pred0 & is0))
    fp0 = int(np.sum(pred0 & ~is0))
    tp1 = int(np.sum(~pred0 & ~is0))
    fp1 = int(np.sum(~pred0 & is0))
    n0, n1 = tp0 + fp1, tp1 + fp0
    return ClassifierReport(
        B=B,
        cutoff=float(C),
        accuracy=(tp0 + tp1) / (n0 + n1),
        tp0=tp0,
        fp0=fp0,
        tp1=tp1,
        fp1=fp1,
        n0=n0,
        n1=n1,
    )


def candidate_cutoffs(S):
    """One threshold per gap: below the minimum, each midpoint, above the maximum."""
    distinct = np.unique(S)
    mids = (distinct[:-1] + distinct[1:]) / 2
    return np.concatenate(([distinct[0] - 1.0], mids, [distinct[-1] + 1.0]))


def optimal_cutoff(scores, B=float("nan")):
    """Accuracy-maximising cutoff; the smallest one wins ties."""
    S, ranks = _as_arrays(scores)
    s0 = np.sort(S[ranks == 0])
    s1 = np.sort(S[ranks == 1])
    if s0.size == 0 or s1.size == 0:
        raise DegenerateInputError(
            f"optimal cutoff needs both rank classes (n0={s0.size}, n1={s1.size})"
        )

    candidates = candidate_cutoffs(S)
    correct0 = s0.size - np.searchsorted(s0, candidates, side="right")
    correct1 = np.searchsorted(s1, candidates, side="right")
    best = int(np.argmax(correct0 + correct1))  # first maximum = smallest C

    report = _report(S, ranks, candidates[best], B)
    logging.debug(f"B={B:g}: best of {len(candidates)} cutoffs is {report.cutoff:.6f}")
    return report


def accuracy_by_B(traces, records, B_values, ap_rows=None):
    """Optimal-cutoff report at each B; off-grid B values need the a_p rows."""
    reports = []
    for B in B_values:
        scores = score_table(traces, records, B, ap_rows=ap_rows)
        report = optimal_cutoff(scores, B=float(B))
        logging.info(f"B={B:g}: C={report.cutoff:.4f}, accuracy={report.accuracy:.2%}")
        reports.append(report)
    return reports


def _window_crests(traces, records, N_ref, smooth):
    """First two local maxima of the rank-0 minus rank-1 mean, NaN if absent."""
    families = family_average(traces, [r.rank for r in records])
    try:
        crests = empirical_maxima(families, N_ref, window=smooth)
    except OutOfRangeError as e:
        logging.debug(f"Crests skipped for N={N_ref}: {e}")
        crests = []
    return (crests + [float("nan")] * 2)[:2]


def window_reports(traces, records, B_values, windows, ap_rows=None, smooth=5):
    """Optimal cutoff C(N) per conductor window and B, with the window's crests.

    `windows` is a list of (lo, hi) conductor ranges, e.g. from
    dataset.conductor_windows. Windows without curves of both ranks are skipped.
    Crests are B/lo for the first two local maxima of the mean difference and
    need the grid to cover [0.01*lo, 2*lo]; otherwise they are NaN.
    """
    rows = []
    for lo, hi in windows:
        idx = [i for i, r in enumerate(records) if lo <= r.conductor <= hi]
        sub_records = [records[i] for i in idx]
        ranks = {r.rank for r in sub_records}
        if ranks != {0, 1}:
            logging.debug(f"Window [{lo}, {hi}] skipped: ranks present {sorted(ranks)}")
            continue
        sub_traces = [traces[i] for i in idx]
        sub_rows = None if ap_rows is None else [ap_rows[i] for i in idx]

        crest1, crest2 = _window_crests(sub_traces, sub_records, lo, smooth)
        for report in accuracy_by_B(sub_traces, sub_records, B_values, ap_rows=sub_rows):
            rows.append({"lo": lo, "hi": hi, **report.as_row(), "crest1": crest1, "crest2": crest2})

    if not rows:
        raise EmptyClassError("no conductor window holds curves of both ranks")
    logging.info(f"Classified {len({(r['lo'], r['hi']) for r in rows})} of {len(windows)} windows")
    return pd.DataFrame(rows, columns=WINDOW_COLUMNS)


def reports_frame(reports):
    return pd.DataFrame([r.as_row() for r in reports])


def text_histogram(values, title, bins=HISTOGRAM_BINS, lo=None, hi=None):
    """ASCII histogram of a list of floats."""
    values = [float(v) for v in values]
    if not values:
        return f"{title}: No data available."
    lo = min(values) if lo is None else lo
    hi = max(values) if hi is None else hi
    if hi <= lo:
        hi = lo + 1.0

    counts = [0] * bins
    bin_width = (hi - lo) / bins
    for val in values:
        val = max(lo, min(hi, val))
        idx = min(bins - 1, int((val - lo) / bin_width))
        counts[idx] += 1

    max_count = max(counts)
    scale = HISTOGRAM_BAR_WIDTH / max_count if max_count > 0 else 1

    output = [f"\n--- {title} ---"]
    for i in range(bins):
        low = lo + i * bin_width
        high = lo + (i + 1) * bin_width
        bar = "#" * int(counts[i] * scale)
        label = f"{low:+.3f}..{high:+.3f}"
        output.append(f"{label:>15} | {bar:<{HISTOGRAM_BAR_WIDTH}} ({counts[i]})")
    return "\n".join(output)
