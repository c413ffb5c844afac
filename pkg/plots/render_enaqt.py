#!/usr/bin/env python3
"""Transport-efficiency curves: one point per run, efficiency against the
dephasing rate, with site populations of the first run inset."""

import argparse
import json

from figkit import load_table, manifest_footer, new_figure, save_figure


def render(csv_paths, out_path):
    fig = new_figure(6.0, 4.2)
    ax = fig.add_subplot(111)
    gammas, etas, errs = [], [], []
    for csv_path in csv_paths:
        with open(csv_path + ".eta.json") as fh:
            eta = json.load(fh)
        gammas.append(eta["gamma"])
        etas.append(eta["eta_target"])
        errs.append(eta.get("eta_stderr", [0])[-1])
    order = sorted(range(len(gammas)), key=lambda i: gammas[i])
    ax.errorbar(
        [max(gammas[i], 1e-3) for i in order],
        [etas[i] for i in order],
        yerr=[errs[i] for i in order],
        marker="o", color="#b03a2e", capsize=3,
    )
    ax.set_xscale("log")
    ax.set_xlabel(r"dephasing rate $\gamma / J$")
    ax.set_ylabel("target-site efficiency")
    data = load_table(csv_paths[0], ["t"])
    inset = fig.add_axes([0.58, 0.58, 0.3, 0.28])
    site_cols = [c for c in data if c.startswith("p_")]
    for col in site_cols[:3] + site_cols[-1:]:
        inset.plot(data["t"], data[col], lw=0.7, label=col)
    inset.set_xlabel("t J", fontsize=6)
    inset.tick_params(labelsize=6)
    inset.legend(fontsize=5)
    save_figure(fig, out_path, manifest_footer(csv_paths[0]))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("csv", nargs="+")
    p.add_argument("-o", "--output", required=True)
    args = p.parse_args()
    render(args.csv, args.output)


if __name__ == "__main__":
    main()
