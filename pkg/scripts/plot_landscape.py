#!/usr/bin/env python3
"""Plot the CSV outputs of a `routewalk walk` run.

Produces correlation.png (autocorrelation vs lag) and scatter.png
(fitness vs Hamming distance to the best sample) next to the inputs,
or under --out if given.

Usage:
    python scripts/plot_landscape.py runs/hotspot-6cycle
"""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def plot_correlation(run_dir: Path, out_dir: Path) -> Path:
    rows = load_rows(run_dir / "correlation.csv")
    lags = [int(r["lag"]) for r in rows]
    values = [float(r["r"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lags, values, lw=1.2)
    ax.axhline(0.0, color="grey", lw=0.6)
    ax.axhline(1 / 2.718281828, color="grey", lw=0.6, ls="--", label="1/e")
    ax.set_xlabel("lag s (walk steps)")
    ax.set_ylabel("autocorrelation r(s)")
    ax.set_title(f"Correlation plot: {run_dir.name}")
    ax.legend(loc="upper right")
    fig.tight_layout()
    target = out_dir / "correlation.png"
    fig.savefig(target, dpi=150)
    plt.close(fig)
    return target


def plot_scatter(run_dir: Path, out_dir: Path) -> Path:
    rows = load_rows(run_dir / "scatter.csv")
    distances = [int(r["hamming_distance_to_best"]) for r in rows]
    fitnesses = [float(r["fitness_seconds"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(distances, fitnesses, s=8, alpha=0.35, edgecolors="none")
    ax.set_xlabel("Hamming distance to best found")
    ax.set_ylabel("mean delay (s)")
    ax.set_title(f"Scatter plot: {run_dir.name}")
    fig.tight_layout()
    target = out_dir / "scatter.png"
    fig.savefig(target, dpi=150)
    plt.close(fig)
    return target


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("run_dir", type=Path, help="directory written by `routewalk walk`")
    parser.add_argument("--out", type=Path, default=None, help="where to put the PNGs")
    args = parser.parse_args()
    out_dir = args.out or args.run_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    for made in (plot_correlation(args.run_dir, out_dir), plot_scatter(args.run_dir, out_dir)):
        print(f"wrote {made}")


if __name__ == "__main__":
    main()
