#!/usr/bin/env python3
"""Two-tone stability-region map from a stability-scan table."""

import argparse

import numpy as np

from figkit import load_table, manifest_footer, new_figure, save_figure


def render(csv_path, out_path):
    data = load_table(csv_path, ["a", "q", "stable"])
    a_vals = np.unique(data["a"])
    q_vals = np.unique(data["q"])
    grid = np.zeros((len(a_vals), len(q_vals)))
    ai = np.searchsorted(a_vals, data["a"])
    qi = np.searchsorted(q_vals, data["q"])
    grid[ai, qi] = data["stable"]
    fig = new_figure(5.2, 4.2)
    ax = fig.add_subplot(111)
    ax.pcolormesh(
        q_vals, a_vals, grid, cmap="Blues", vmin=-0.15, vmax=1.1, shading="nearest"
    )
    ax.set_xlabel("q")
    ax.set_ylabel("a")
    ax.set_title("stable drive region")
    save_figure(fig, out_path, manifest_footer(csv_path))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("csv")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args()
    render(args.csv, args.output)


if __name__ == "__main__":
    main()
