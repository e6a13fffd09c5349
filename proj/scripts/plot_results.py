#!/usr/bin/env python3
"""Figures from rampflow CSV output.

    python3 scripts/plot_results.py sweep out/sweep.csv -o sweep.png
    python3 scripts/plot_results.py profiles out/snapshots.csv --times 0 2 4 6 -o profiles.png
    python3 scripts/plot_results.py compare a/snapshots.csv b/snapshots.csv --labels "delta=0.1" "delta=0.5"
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def plot_sweep(args):
    df = pd.read_csv(args.csv)
    fig, (ax_j, ax_psi) = plt.subplots(1, 2, figsize=(10, 4))
    ax_j.plot(df["delta"], df["J"], "o-")
    ax_j.set_xlabel("delta")
    ax_j.set_ylabel("J")
    ax_psi.plot(df["delta"], df["Psi"], "o-", color="tab:red")
    best = df[df["psi_argmin"] == 1]
    ax_psi.plot(best["delta"], best["Psi"], "k*", markersize=14)
    ax_psi.set_xlabel("delta")
    ax_psi.set_ylabel("Psi")
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


def nearest_snapshot(df, t):
    times = df["t"].unique()
    return df[df["t"] == times[abs(times - t).argmin()]]


def plot_profiles(args):
    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(8, 4))
    times = args.times or sorted(df["t"].unique())[:: max(1, df["t"].nunique() // 5)]
    for t in times:
        snap = nearest_snapshot(df, t)
        ax.plot(snap["x"], snap["rho"], label=f"t={snap['t'].iloc[0]:.3g}")
    ax.set_xlabel("x")
    ax.set_ylabel("rho")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


def plot_compare(args):
    fig, ax = plt.subplots(figsize=(8, 4))
    labels = args.labels or args.csv
    for path, label in zip(args.csv, labels):
        df = pd.read_csv(path)
        snap = df[df["t"] == df["t"].max()]
        ax.plot(snap["x"], snap["rho"], label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("rho at final time")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="kind", required=True)
    p = sub.add_parser("sweep")
    p.add_argument("csv")
    p.add_argument("-o", "--output", default="sweep.png")
    p.set_defaults(func=plot_sweep)
    p = sub.add_parser("profiles")
    p.add_argument("csv")
    p.add_argument("--times", type=float, nargs="*")
    p.add_argument("-o", "--output", default="profiles.png")
    p.set_defaults(func=plot_profiles)
    p = sub.add_parser("compare")
    p.add_argument("csv", nargs="+")
    p.add_argument("--labels", nargs="*")
    p.add_argument("-o", "--output", default="compare.png")
    p.set_defaults(func=plot_compare)
    args = parser.parse_args()
    args.func(args)


if __name__ == "__main__":
    main()
