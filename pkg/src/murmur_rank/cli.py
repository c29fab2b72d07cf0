"""Command-line entry point: `python -m murmur_rank <command> [flags]`."""

import argparse
import logging
import sys

import pandas as pd

from . import config as cfg_mod
from .ap_engine import ap_batch
from .classifier import accuracy_by_B, reports_frame, text_histogram, window_reports
from .dataset import CurveRecord, conductor_windows, filter_conductor, load_curves, split_by_rank
from .density import euler_constants
from .errors import EmptyClassError, InvalidArgumentError, MurmurRankError
from .fx import (
    MainTermModel,
    empirical_maxima,
    figure3_frame,
    limit_constants,
    local_maxima,
    sweep_maxima,
)
from .nagao import ap_average_profile, family_average, family_frame, sb_traces, score_table
from .primes import prime_factors, sieve
from .reports import (
    ap_frame,
    format_constants,
    format_maxima,
    traces_frame,
    write_csv,
)

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


# --------------------------------------------------
# --- Shared helpers ---
# --------------------------------------------------
def _load_window(cfg):
    records = load_curves(cfg.dataset)
    lo, hi = cfg.window
    records = filter_conductor(records, lo, hi)
    if not records:
        raise EmptyClassError(f"no curves with conductor in [{lo}, {hi}] in {cfg.dataset}")
    groups = split_by_rank(records)
    logging.info(
        f"Window [{lo}, {hi}]: {len(groups[0])} rank-0 and {len(groups[1])} rank-1 curves"
    )
    return records


def _traces(cfg, records, table, limit=None):
    grid = cfg.grid()
    limit = int(max(grid.max, limit or 0))
    ap_rows = ap_batch(records, table, workers=cfg.workers, limit=limit)
    return sb_traces(records, grid, table, ap_rows=ap_rows), ap_rows


def _curve_from_spec(spec, conductor=None):
    try:
        ainvs = [int(v) for v in spec.replace(" ", "").strip("[]()").split(",")]
    except ValueError:
        raise InvalidArgumentError(f"curve must be five integers a1,a2,a3,a4,a6: {spec!r}") from None
    if len(ainvs) != 5:
        raise InvalidArgumentError(f"curve needs five coefficients, got {len(ainvs)}")
    candidate = CurveRecord("input", *ainvs, conductor=1, rank=0)
    if candidate.discriminant == 0:
        raise InvalidArgumentError(f"singular curve {ainvs} (discriminant 0)")
    if conductor is None:
        # Bad primes of a minimal model are the primes dividing the discriminant.
        conductor = 1
        for p in prime_factors(candidate.discriminant):
            conductor *= p
    return CurveRecord("input", *ainvs, conductor=conductor, rank=0).validate()


# --------------------------------------------------
# --- Commands ---
# --------------------------------------------------
def cmd_ap(cfg, args):
    rec = _curve_from_spec(args.curve, args.conductor)
    table = sieve(cfg.prime_limit)
    (row,) = ap_batch([rec], table, workers=1)
    df = ap_frame([row])[["p", "ap"]]
    print(df.to_string(index=False))
    if args.save:
        write_csv(ap_frame([row]), cfg.output_path("ap.csv"), cfg.force)
    return 0


def cmd_trace(cfg, args):
    records = _load_window(cfg)
    table = sieve(cfg.prime_limit)
    traces, _ = _traces(cfg, records, table)
    write_csv(traces_frame(traces, records), cfg.output_path("traces.csv"), cfg.force)
    return 0


def cmd_figure1(cfg, args):
    records = _load_window(cfg)
    table = sieve(cfg.prime_limit)
    traces, _ = _traces(cfg, records, table)
    families = family_average(traces, [r.rank for r in records])

    write_csv(family_frame(families), cfg.output_path("figure1_family.csv"), cfg.force)
    write_csv(traces_frame(traces, records), cfg.output_path("figure1_traces.csv"), cfg.force)

    n_ref = cfg.window[0]
    try:
        peaks = empirical_maxima(families, n_ref, window=args.smooth)
        logging.info(f"Mean-difference maxima at B/N = {[round(x, 3) for x in peaks]}")
    except MurmurRankError as e:
        logging.warning(f"Empirical maxima skipped: {e}")
    return 0


def cmd_figure2(cfg, args):
    records = _load_window(cfg)
    table = sieve(cfg.prime_limit)
    profile = ap_average_profile(records, table, workers=cfg.workers)
    write_csv(profile, cfg.output_path("figure2_profile.csv"), cfg.force)
    return 0


def cmd_figure3(cfg, args):
    N = args.N
    consts = euler_constants(cfg.trunc)
    table = sieve(max(cfg.prime_limit, int(N)))
    df = figure3_frame(N, consts, table)
    write_csv(df, cfg.output_path("figure3.csv"), cfg.force)
    x1, x2 = sweep_maxima(df["x"], df["f_exact"])
    logging.info(f"f(x) sweep for N={N:g}: branch maxima at x1={x1}, x2={x2}")
    return 0


def cmd_classify(cfg, args):
    records = _load_window(cfg)
    B_values = args.B or cfg.B_values
    table = sieve(max(cfg.prime_limit, int(max(B_values))))
    traces, ap_rows = _traces(cfg, records, table, limit=max(B_values))
    reports = accuracy_by_B(traces, records, B_values, ap_rows=ap_rows)

    for report in reports:
        print(report.format_table())
        scores = score_table(traces, records, report.B, ap_rows=ap_rows)
        for rank in (0, 1):
            values = scores.loc[scores["rank"] == rank, "S"].tolist()
            print(text_histogram(values, f"S({report.B:g}) rank {rank}"))
    write_csv(reports_frame(reports), cfg.output_path("classify.csv"), cfg.force)

    if args.sqrt_windows:
        conductors = [r.conductor for r in records]
        windows = conductor_windows(min(conductors), max(conductors), args.width_factor)
        per_window = window_reports(
            traces, records, B_values, windows, ap_rows=ap_rows, smooth=args.smooth
        )
        print(per_window.to_string(index=False))
        write_csv(per_window, cfg.output_path("classify_windows.csv"), cfg.force)
    return 0


def cmd_table1(cfg, args):
    consts = euler_constants(cfg.trunc)
    rows = []
    for N in cfg_mod.TABLE1_N:
        report = local_maxima(MainTermModel(N, consts), cfg.tol)
        rows.append(report.as_row())
        print(f"{N:>10}  {report.x1:.5f}  {report.x2:.5f}")
    write_csv(pd.DataFrame(rows), cfg.output_path("table1.tsv"), cfg.force, sep="\t")
    return 0


def cmd_constants(cfg, args):
    consts = euler_constants(cfg.trunc, first_prime=args.first_prime)
    print(format_constants(consts, limit_constants(consts)))
    return 0


def cmd_maxima(cfg, args):
    consts = euler_constants(cfg.trunc)
    for N in args.N:
        print(format_maxima(local_maxima(MainTermModel(N, consts), cfg.tol)))
    return 0


COMMANDS = {
    "ap": cmd_ap,
    "trace": cmd_trace,
    "figure1": cmd_figure1,
    "figure2": cmd_figure2,
    "figure3": cmd_figure3,
    "classify": cmd_classify,
    "table1": cmd_table1,
    "constants": cmd_constants,
    "maxima": cmd_maxima,
}


# --------------------------------------------------
# --- Argument parsing ---
# --------------------------------------------------
def _common_flags():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run file (flags take precedence)")
    common.add_argument("--dataset", help="labelled curve CSV")
    common.add_argument("--window", help="conductor window LO:HI")
    common.add_argument("--primes", type=int, help="prime limit")
    common.add_argument("--grid", help="B grid, GEOM:START:RATIO or LIST:B1,B2,...")
    common.add_argument("--trunc", type=int, help="Euler product truncation P")
    common.add_argument("--tol", type=float, help="numerical tolerance")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--out", help="output directory")
    common.add_argument("--force", action="store_true", default=None, help="overwrite outputs")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true")
    verbosity.add_argument("--quiet", action="store_true")
    return common


def build_parser():
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="murmur_rank", description="Mestre-Nagao sums and murmurations of elliptic curves"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ap", parents=[common], help="a_p of one curve")
    p.add_argument("curve", help="a1,a2,a3,a4,a6")
    p.add_argument("--conductor", type=int, help="conductor (default: radical of the discriminant)")
    p.add_argument("--save", action="store_true", help="also write ap.csv")

    sub.add_parser("trace", parents=[common], help="S(B) traces of every curve in the window")

    p = sub.add_parser("figure1", parents=[common], help="mean S(B) per rank with 90%% CIs")
    p.add_argument("--smooth", type=int, default=5, help="moving-average window for maxima")

    sub.add_parser("figure2", parents=[common], help="mean a_p per prime and rank")

    p = sub.add_parser("figure3", parents=[common], help="f(x) sweep and main term")
    p.add_argument("--N", type=float, default=cfg_mod.FIGURE3_N)

    p = sub.add_parser("classify", parents=[common], help="optimal cutoff per B")
    p.add_argument("--B", type=float, nargs="+", help="B values (default: 3200 50000)")
    p.add_argument(
        "--sqrt-windows",
        action="store_true",
        help="also report C(N), accuracy and crests per window [N, N + w*sqrt(N)]",
    )
    p.add_argument("--width-factor", type=float, default=10.0, help="w for --sqrt-windows")
    p.add_argument("--smooth", type=int, default=5, help="moving-average window for crests")

    sub.add_parser("table1", parents=[common], help="maxima of the main terms for N = 10^4..10^8")

    p = sub.add_parser("constants", parents=[common], help="Euler-product constants")
    p.add_argument("--first-prime", type=int, default=3, choices=(2, 3))

    p = sub.add_parser("maxima", parents=[common], help="maxima of the main terms at given N")
    p.add_argument("--N", type=float, nargs="+", default=[float(cfg_mod.FIGURE3_N)])
    return parser


def _config_from_args(args):
    file_values = cfg_mod.load_config_file(args.config) if args.config else None
    flags = {
        "dataset": args.dataset,
        "window": args.window,
        "primes": args.primes,
        "grid": args.grid,
        "trunc": args.trunc,
        "tol": args.tol,
        "workers": args.workers,
        "out": args.out,
        "force": args.force,
    }
    return cfg_mod.build_config(flags, file_values)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)

    try:
        cfg = _config_from_args(args)
        return COMMANDS[args.command](cfg, args)
    except MurmurRankError as e:
        if args.verbose:
            logging.exception(str(e))
        else:
            logging.error(str(e))
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
