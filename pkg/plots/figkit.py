"""Shared plumbing for the figure renderers.

Every renderer loads delimited tables through `load_table`, which fails
loudly naming any missing column, and saves through `save_figure`, which
pins the canvas so identical inputs give identical images. A run
manifest sitting next to the input is stamped into the figure footer.
"""

import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    pass


def load_table(path, required_columns):
    """Read a one-header-line CSV into a dict of float arrays."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    missing = [c for c in required_columns if c not in header]
    if missing:
        raise SchemaError(
            f"{os.path.basename(path)} is missing required columns {missing}; "
            f"found {header}"
        )
    data = {}
    for col in header:
        idx = header.index(col)
        data[col] = np.array([float(r[idx]) for r in rows])
    return data


def manifest_footer(csv_path):
    """Provenance line from the manifest written next to the CSV."""
    manifest_path = csv_path + ".manifest.json"
    if not os.path.exists(manifest_path):
        return ""
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    seed = manifest.get("seed")
    seed_part = f", seed {seed}" if seed is not None else ""
    return (
        f"{manifest.get('subcommand', '?')} v{manifest.get('toolkit_version', '?')}"
        f"{seed_part}"
    )


def new_figure(width=6.0, height=4.0):
    plt.rcParams["font.size"] = 9
    plt.rcParams["svg.hashsalt"] = "iontrap-lab"
    return plt.figure(figsize=(width, height), dpi=120)


def save_figure(fig, out_path, footer=""):
    if footer:
        fig.text(0.01, 0.005, footer, fontsize=6, color="0.45")
    fig.savefig(out_path, dpi=120, metadata=_stable_metadata(out_path))
    plt.close(fig)


def _stable_metadata(out_path):
    # strip creator timestamps so reruns are byte-identical
    if out_path.endswith(".png"):
        return {"Software": "iontrap-lab-plots"}
    if out_path.endswith(".svg"):
        return {"Date": None}
    return None
