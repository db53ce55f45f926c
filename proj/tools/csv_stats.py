#!/usr/bin/env python3
"""Column statistics for simulation CSV files.

Computes per-column mean / min / max / final value, optionally restricted
to a trailing time window (for steady-state readings) and to a subset of
columns. Blank cells (used for "not recorded") are skipped.

Examples:
    csv_stats.py run.csv
    csv_stats.py run.csv --window 0.1 --cols v_dc,omega,v_ac_amplitude
    csv_stats.py net.csv --cols P_x_1,P_x_2 --ratio P_x_1/P_x_2 --window 0.05
"""

import argparse
import csv
import math
import sys


def read_table(path):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = []
        for rec in reader:
            rows.append([float(c) if c else math.nan for c in rec])
    return header, rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv_file")
    ap.add_argument("--window", type=float, default=None, metavar="SECONDS",
                    help="restrict to the trailing window of the time axis")
    ap.add_argument("--cols", default=None,
                    help="comma-separated column names (default: all)")
    ap.add_argument("--ratio", default=None, metavar="A/B",
                    help="also report the mean of column A over column B")
    args = ap.parse_args()

    header, rows = read_table(args.csv_file)
    if not rows:
        sys.exit("no data rows")

    if args.window is not None:
        t_col = header.index("t")
        t_end = rows[-1][t_col]
        rows = [r for r in rows if r[t_col] >= t_end - args.window]

    names = args.cols.split(",") if args.cols else header
    width = max(len(n) for n in names)
    print(f"{'column':<{width}}  {'mean':>22}  {'min':>22}  "
          f"{'max':>22}  {'final':>22}   n")
    for name in names:
        if name not in header:
            sys.exit(f"unknown column: {name}")
        k = header.index(name)
        vals = [r[k] for r in rows if not math.isnan(r[k])]
        if not vals:
            print(f"{name:<{width}}  {'(blank)':>22}")
            continue
        mean = sum(vals) / len(vals)
        print(f"{name:<{width}}  {mean:>22.15g}  {min(vals):>22.15g}  "
              f"{max(vals):>22.15g}  {vals[-1]:>22.15g}   {len(vals)}")

    if args.ratio:
        num_name, den_name = args.ratio.split("/")
        kn, kd = header.index(num_name), header.index(den_name)
        ratios = [r[kn] / r[kd] for r in rows
                  if not math.isnan(r[kn]) and not math.isnan(r[kd])
                  and r[kd] != 0.0]
        mean = sum(ratios) / len(ratios)
        print(f"\nmean {num_name}/{den_name} = {mean:.15g}  "
              f"(min {min(ratios):.15g}, max {max(ratios):.15g}, "
              f"n={len(ratios)})")


if __name__ == "__main__":
    main()
