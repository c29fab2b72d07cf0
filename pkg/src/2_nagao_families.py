import logging
import os

from murmur_rank.ap_engine import ap_batch
from murmur_rank.config import DEFAULT_DATASET
from murmur_rank.dataset import filter_conductor, load_curves, split_by_rank
from murmur_rank.fx import empirical_maxima
from murmur_rank.nagao import (
    ap_average_profile,
    family_average,
    family_frame,
    geometric_grid,
    sb_traces,
)
from murmur_rank.primes import sieve
from murmur_rank.reports import write_csv

# --------------------------------------------------
# --- "THE FAMILIES" SCRIPT CONFIGURATION ---
# --------------------------------------------------
# Mean S(B) per rank with 90% confidence bands, and mean a_p per prime and
# rank, for one conductor window.
DATASET = DEFAULT_DATASET
CONDUCTOR_WINDOW = (1, 100)  # study window: (40_000, 45_000)
PRIME_LIMIT = 5_000  # study run: 50_000
GRID_RATIO = 1.05
SMOOTHING_WINDOW = 5
WORKERS = 4
OVERWRITE = True

OUTPUT_DIR = "output"

logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s"
)


def run_families():
    records = filter_conductor(load_curves(DATASET), *CONDUCTOR_WINDOW)
    groups = split_by_rank(records)
    logging.info("=" * 60)
    logging.info(f"WINDOW {CONDUCTOR_WINDOW}: rank 0 = {len(groups[0])}, rank 1 = {len(groups[1])}")
    logging.info("=" * 60)

    table = sieve(PRIME_LIMIT)
    grid = geometric_grid(PRIME_LIMIT, ratio=GRID_RATIO)
    ap_rows = ap_batch(records, table, workers=WORKERS)

    traces = sb_traces(records, grid, table, ap_rows=ap_rows)
    families = family_average(traces, [r.rank for r in records])
    write_csv(family_frame(families), os.path.join(OUTPUT_DIR, "figure1_family.csv"), OVERWRITE)

    profile = ap_average_profile(records, table, ap_rows=ap_rows)
    write_csv(profile, os.path.join(OUTPUT_DIR, "figure2_profile.csv"), OVERWRITE)

    n_ref = CONDUCTOR_WINDOW[0]
    if grid.values[0] <= 0.01 * n_ref and grid.max >= 2 * n_ref:
        peaks = empirical_maxima(families, n_ref, window=SMOOTHING_WINDOW)
        logging.info(f"Mean-difference maxima at B/N = {[round(x, 3) for x in peaks]}")
    else:
        logging.info("Grid does not span [0.01N, 2N]; empirical maxima skipped.")


if __name__ == "__main__":
    run_families()
