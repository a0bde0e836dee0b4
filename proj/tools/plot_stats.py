#!/usr/bin/env python3
"""Render the per-step statistics CSV written by `pgcap build --stats full`.

Two panels: the gain ratios delta_*/E against w/k, and the tangent-load
dispersion gamma_min/gamma_aver, gamma_max/gamma_aver against w/k.

Usage: plot_stats.py RUN.stats.csv [-o OUT.png]
"""

import argparse
import csv
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    rows = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            if int(row["w"]) < 1:
                continue  # empty-cap start carries no tangent data
            rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv_path")
    ap.add_argument("-o", "--out", default=None, help="output image path")
    args = ap.parse_args()

    rows = load(args.csv_path)
    if not rows:
        raise SystemExit("no usable rows in " + args.csv_path)
    k = len(rows) + 1
    x = [int(r["w"]) / k for r in rows]

    def ratio(col):
        return [float(r[col]) / float(r["E"]) for r in rows]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(12, 4.5))

    ax1.plot(x, ratio("delta_max"), "r-", label="delta_max / E")
    ax1.plot(x, ratio("delta_aver"), "b-.", label="delta_aver / E")
    ax1.plot(x, ratio("delta_min"), "r:", label="delta_min / E")
    ax1.plot(x, ratio("delta_rigor"), "k--", label="delta_rigor / E")
    ax1.axhline(1.0, color="g", lw=0.8)
    ax1.axhline(0.2, color="g", lw=0.8, ls=":")
    ax1.set_xlabel("w / k")
    ax1.set_ylabel("gain / E")
    ax1.set_yscale("log")
    ax1.legend(fontsize=8)
    ax1.set_title("step gains against the expectation benchmark")

    g_aver = [float(r["gamma_aver"]) for r in rows]
    g_max = [float(r["gamma_max"]) / a if a else math.nan for r, a in zip(rows, g_aver)]
    g_min = [float(r["gamma_min"]) / a if a else math.nan for r, a in zip(rows, g_aver)]
    ax2.plot(x, g_max, "k-", label="gamma_max / gamma_aver")
    ax2.plot(x, g_min, "k-", lw=0.8, label="gamma_min / gamma_aver")
    ax2.axhline(1.0, color="r", ls="-.", lw=0.8)
    ax2.set_xlabel("w / k")
    ax2.set_ylabel("tangent load / average")
    ax2.legend(fontsize=8)
    ax2.set_title("dispersion of uncovered points per tangent")

    fig.tight_layout()
    out = args.out or args.csv_path.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=130)
    print(out)


if __name__ == "__main__":
    main()
