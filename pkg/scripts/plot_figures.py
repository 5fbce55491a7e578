"""Plot CSVs written by reproduce_figures.py (needs matplotlib).

    python scripts/plot_figures.py results
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

PANELS = {
    "fidelity": [("F_ave", "F_natural", "averaged fidelity"), ("P_success", None, "averaged success probability")],
    "concurrence": [("concurrence", "concurrence_natural", "concurrence"), ("P_ed", None, "success probability")],
}


def load(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    return data


def plot(path: Path):
    d = load(path)
    kind = "fidelity" if "F_ave" in d.dtype.names else "concurrence"
    ps = np.unique(d["p"])
    fig, axes = plt.subplots(1, 2, figsize=(10, 3.8))
    for ax, (col, natural, label) in zip(axes, PANELS[kind]):
        if natural:
            sel = d["p"] == ps[0]
            ax.plot(d["t"][sel], d[natural][sel], "k*", ms=3, label="natural")
        for p in ps:
            sel = d["p"] == p
            ax.plot(d["t"][sel], d[col][sel], label=f"p={p:g}")
        ax.set_xlabel("t")
        ax.set_ylabel(label)
        ax.legend(fontsize=8)
    fig.suptitle(path.stem)
    fig.tight_layout()
    out = path.with_suffix(".png")
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    root = Path(sys.argv[1] if len(sys.argv) > 1 else "results")
    for csv_path in sorted(root.glob("*.csv")):
        plot(csv_path)
