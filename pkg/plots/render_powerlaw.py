#!/usr/bin/env python3
"""Spin-spin couplings against ion separation on log axes, one series per
input table, with the fitted power law from the companion fit report."""

import argparse
import json
import os

import numpy as np

from figkit import load_table, manifest_footer, new_figure, save_figure


def render(csv_paths, out_path):
    fig = new_figure(5.4, 4.0)
    ax = fig.add_subplot(111)
    colors = ["#1f4e79", "#b03a2e", "#1e8449", "#6c3483"]
    for idx, csv_path in enumerate(csv_paths):
        data = load_table(csv_path, ["j", "k", "J_hz"])
        dist = np.abs(data["k"] - data["j"])
        color = colors[idx % len(colors)]
        label = os.path.basename(csv_path)
        fit_path = csv_path + ".fit.json"
        if os.path.exists(fit_path):
            with open(fit_path) as fh:
                fit = json.load(fh)
            ds = np.linspace(1, dist.max(), 50)
            ax.plot(ds, fit["J0_hz"] / ds ** fit["p"], "--", color=color, lw=0.9)
            label += f" (p = {fit['p']:.2f})"
        ax.plot(dist, np.abs(data["J_hz"]), "o", ms=3.5, color=color, label=label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("ion separation |j - k|")
    ax.set_ylabel("|J| (Hz)")
    ax.legend(fontsize=7)
    save_figure(fig, out_path, manifest_footer(csv_paths[0]))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("csv", nargs="+")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args()
    render(args.csv, args.output)


if __name__ == "__main__":
    main()
