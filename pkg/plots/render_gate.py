#!/usr/bin/env python3
"""Entangling-gate population traces: even and odd parities over time."""

import argparse

from figkit import load_table, manifest_footer, new_figure, save_figure


def render(csv_path, out_path):
    data = load_table(csv_path, ["t", "P_dd", "P_ud_du", "P_uu"])
    fig = new_figure(6.2, 3.8)
    ax = fig.add_subplot(111)
    t_us = data["t"] * 1e6
    ax.plot(t_us, data["P_dd"], color="black", label=r"$P_{\downarrow\downarrow}$")
    ax.plot(t_us, data["P_ud_du"], color="#b03a2e",
            label=r"$P_{\uparrow\downarrow}+P_{\downarrow\uparrow}$")
    ax.plot(t_us, data["P_uu"], color="#1f4e79", label=r"$P_{\uparrow\uparrow}$")
    ax.set_xlabel(r"gate time ($\mu$s)")
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    save_figure(fig, out_path, manifest_footer(csv_path))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("csv")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args()
    render(args.csv, args.output)


if __name__ == "__main__":
    main()
