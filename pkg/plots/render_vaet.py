#!/usr/bin/env python3
"""Donor-population traces of the dephased spin-boson model, with the
engineered spectral density alongside when present."""

import argparse
import os

from figkit import load_table, manifest_footer, new_figure, save_figure


def render(csv_paths, out_path):
    spectral = [p for p in csv_paths if p.endswith(".spectral_density.csv")]
    traces = [p for p in csv_paths if not p.endswith(".spectral_density.csv")]
    n_panels = 2 if spectral else 1
    fig = new_figure(6.4, 3.6)
    ax = fig.add_subplot(1, n_panels, 1)
    for csv_path in traces:
        data = load_table(csv_path, ["t_ps", "P_D"])
        ax.plot(data["t_ps"], data["P_D"], lw=1.0, label=os.path.basename(csv_path))
    ax.set_xlabel("time (ps)")
    ax.set_ylabel("donor population")
    ax.set_ylim(0, 1.02)
    ax.legend(fontsize=6)
    if spectral:
        ax2 = fig.add_subplot(1, 2, 2)
        data = load_table(spectral[0], ["omega_cm1", "J"])
        ax2.plot(data["omega_cm1"], data["J"], lw=1.0, color="#1e8449")
        ax2.set_xlabel(r"$\omega$ (cm$^{-1}$)")
        ax2.set_ylabel(r"spectral density $J(\omega)$")
    save_figure(fig, out_path, manifest_footer(traces[0] if traces else csv_paths[0]))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("csv", nargs="+")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args()
    render(args.csv, args.output)


if __name__ == "__main__":
    main()
