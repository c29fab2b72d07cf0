import logging
import os

import pandas as pd

from .errors import InvalidArgumentError, OutputExistsError, ParseError

# --------------------------------------------------
# --- REPORT SCHEMAS ---
# --------------------------------------------------
AP_COLUMNS = ["label", "p", "ap"]
TRACE_COLUMNS = ["label", "rank", "B", "S"]
FAMILY_COLUMNS = ["B", "mean_rank0", "ci0", "mean_rank1", "ci1"]
PROFILE_COLUMNS = ["p", "avg_rank0", "avg_rank1"]
FIGURE3_COLUMNS = ["x", "f_exact", "main_term"]
TABLE1_COLUMNS = ["N", "x1", "x2"]
CLASSIFIER_COLUMNS = ["B", "cutoff", "accuracy", "tp0", "fp0", "tp1", "fp1", "n0", "n1"]
WINDOW_COLUMNS = ["lo", "hi", *CLASSIFIER_COLUMNS, "crest1", "crest2"]


def write_csv(df, path, force=False, sep=","):
    """Write a report, refusing to replace an existing file unless forced."""
    if os.path.exists(path) and not force:
        raise OutputExistsError(f"{path} already exists (use --force to overwrite)")
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    df.to_csv(path, index=False, sep=sep, float_format="%.12g")
    logging.info(f"Wrote {len(df)} rows to {path}")
    return path


def read_report(path, columns, sep=","):
    if not os.path.exists(path):
        raise InvalidArgumentError(f"report not found: {path}")
    df = pd.read_csv(path, sep=sep)
    if list(df.columns) != list(columns):
        raise ParseError(f"{path}: expected columns {columns}, got {list(df.columns)}", 1)
    return df


def read_ap_csv(path):
    return read_report(path, AP_COLUMNS)


def read_traces_csv(path):
    return read_report(path, TRACE_COLUMNS)


def read_family_csv(path):
    return read_report(path, FAMILY_COLUMNS)


def read_profile_csv(path):
    return read_report(path, PROFILE_COLUMNS)


def read_figure3_csv(path):
    return read_report(path, FIGURE3_COLUMNS)


def read_table1_tsv(path):
    return read_report(path, TABLE1_COLUMNS, sep="\t")


def read_classifier_csv(path):
    return read_report(path, CLASSIFIER_COLUMNS)


def read_windows_csv(path):
    return read_report(path, WINDOW_COLUMNS)


def ap_frame(rows):
    """Long table of a_p: one row per (curve, good prime)."""
    frames = [pd.DataFrame({"label": row.label, "p": row.primes, "ap": row.ap}) for row in rows]
    if not frames:
        return pd.DataFrame(columns=AP_COLUMNS)
    return pd.concat(frames, ignore_index=True)[AP_COLUMNS]


def traces_frame(traces, records):
    frames = [
        pd.DataFrame({"label": t.label, "rank": rec.rank, "B": t.grid.values, "S": t.values})
        for t, rec in zip(traces, records)
    ]
    if not frames:
        return pd.DataFrame(columns=TRACE_COLUMNS)
    return pd.concat(frames, ignore_index=True)[TRACE_COLUMNS]


def format_constants(consts, limits):
    first, second, lam = limits
    lines = [
        "=" * 60,
        f"MURMURATION CONSTANTS (primes {consts.first_prime} <= p <= {consts.P})",
        "=" * 60,
        f"A        = {consts.A:.12f}",
        f"B        = {consts.B:.12f}",
        f"D2       = {consts.D2:.12f}",
        f"C1       = {consts.C1:.12f}",
        f"C2       = {consts.C2:.12f}",
        f"C3       = {consts.C3:.12f}",
        f"A^2/pi^2 = {first:.8f}",
        f"x2 bound = {second:.8f}",
        f"lambda   = {lam:.8f}",
        f"|log tail| <= {consts.error_bound:.3e} per product",
    ]
    return "\n".join(lines)


def format_maxima(report):
    lines = [
        "=" * 60,
        f"LOCAL MAXIMA OF THE MAIN TERMS (N = {report.N:g})",
        "=" * 60,
        f"x1 = {report.x1:.8f}   g1(x1) = {report.g1_value:.8f}   (limit {report.first_bound:.8f})",
        f"x2 = {report.x2:.8f}   g2(x2) = {report.g2_value:.8f}   (bound {report.second_bound:.8f})",
        f"lambda = {report.lam:.8f}   tol = {report.tol:g}",
    ]
    return "\n".join(lines)
