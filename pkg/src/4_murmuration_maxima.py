import logging
import os

import pandas as pd

from murmur_rank.density import euler_constants
from murmur_rank.fx import MainTermModel, figure3_frame, limit_constants, local_maxima, sweep_maxima
from murmur_rank.primes import sieve
from murmur_rank.reports import format_constants, format_maxima, write_csv

# --------------------------------------------------
# --- "THE MAXIMA" SCRIPT CONFIGURATION ---
# --------------------------------------------------
# Euler-product constants, maxima of the main terms for each N, and the
# f(x) sweep against its main term.
TRUNCATION = 1_000_000
TABLE_N = [10**4, 10**5, 10**6, 10**7, 10**8]
SWEEP_N = 100_000
TOL = 1e-8
OVERWRITE = True

OUTPUT_DIR = "output"

logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s"
)


def run_maxima():
    consts = euler_constants(TRUNCATION)
    print(format_constants(consts, limit_constants(consts)))

    rows = []
    for N in TABLE_N:
        report = local_maxima(MainTermModel(N, consts), TOL)
        print(format_maxima(report))
        rows.append(report.as_row())
    write_csv(pd.DataFrame(rows), os.path.join(OUTPUT_DIR, "table1.tsv"), OVERWRITE, sep="\t")

    sweep = figure3_frame(SWEEP_N, consts, sieve(SWEEP_N))
    write_csv(sweep, os.path.join(OUTPUT_DIR, "figure3.csv"), OVERWRITE)
    x1, x2 = sweep_maxima(sweep["x"], sweep["f_exact"])
    logging.info(f"f(x) for N={SWEEP_N}: largest interior maxima at x = {x1:.4f} and {x2:.4f}")


if __name__ == "__main__":
    run_maxima()
