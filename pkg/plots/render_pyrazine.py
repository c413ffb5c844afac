#!/usr/bin/env python3
"""Bright-state population decay through the intersection, one curve per
bath strength."""

import argparse
import json
import os

from figkit import load_table, manifest_footer, new_figure, save_figure


def render(csv_paths, out_path):
    fig = new_figure(6.0, 3.8)
    ax = fig.add_subplot(111)
    for csv_path in csv_paths:
        data = load_table(csv_path, ["t", "P_up"])
        label = os.path.basename(csv_path)
        manifest_path = csv_path + ".manifest.json"
        if os.path.exists(manifest_path):
            with open(manifest_path) as fh:
                gamma = json.load(fh)["config"].get("gamma")
            if gamma is not None:
                label = rf"$\gamma = {gamma}$"
        ax.plot(data["t"], data["P_up"], lw=1.1, label=label)
    ax.axhline(0.5, color="0.6", lw=0.6, ls=":")
    ax.set_xlabel("time")
    ax.set_ylabel("bright-state population")
    ax.set_ylim(0, 1.02)
    ax.legend(fontsize=8)
    save_figure(fig, out_path, manifest_footer(csv_paths[0]))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("csv", nargs="+")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args()
    render(args.csv, args.output)


if __name__ == "__main__":
    main()
