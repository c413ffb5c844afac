#!/usr/bin/env python3
"""Driven-motion trace: position against scaled time."""

import argparse

from figkit import load_table, manifest_footer, new_figure, save_figure


def render(csv_path, out_path):
    data = load_table(csv_path, ["xi", "x"])
    fig = new_figure(6.4, 3.2)
    ax = fig.add_subplot(111)
    ax.plot(data["xi"], data["x"], lw=0.8, color="#1f4e79")
    ax.set_xlabel(r"scaled time $\xi$")
    ax.set_ylabel("x")
    save_figure(fig, out_path, manifest_footer(csv_path))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("csv")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args()
    render(args.csv, args.output)


if __name__ == "__main__":
    main()
