#!/usr/bin/env python3
"""Transfer-rate spectra over the donor-acceptor gap, overlaying presets."""

import argparse
import os

from figkit import load_table, manifest_footer, new_figure, save_figure


def render(csv_paths, out_path):
    fig = new_figure(6.0, 4.0)
    ax = fig.add_subplot(111)
    colors = ["#1f4e79", "#b03a2e", "#1e8449"]
    for idx, csv_path in enumerate(csv_paths):
        data = load_table(csv_path, ["delta_e", "k_T"])
        ax.plot(
            data["delta_e"], data["k_T"], "o-", ms=3, lw=1.0,
            color=colors[idx % len(colors)], label=os.path.basename(csv_path),
        )
    ax.set_xlabel(r"energy gap $\Delta E / \omega$")
    ax.set_ylabel(r"transfer rate $k_T$")
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
