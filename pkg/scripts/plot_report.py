"""Plot a Monte Carlo CSV written by ``hetlasso bench-inclusion`` or ``bench-mae``.

Needs matplotlib (``pip install .[plot]``). One panel per metric, one line per (n, k).

    python scripts/plot_report.py out/inclusion.csv -o inclusion.png
"""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("-o", "--output", default="report.png")
    args = ap.parse_args()

    curves = defaultdict(list)
    with open(args.csv, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["lambda"]:       # summary rows (chosen-lambda points) have no lambda
                curves[(row["metric"], int(row["n"]), int(row["k"]))].append(
                    (float(row["lambda"]), float(row["value"])))
    if not curves:
        raise SystemExit(f"{args.csv}: no per-lambda rows to plot")

    metrics = sorted({m for m, _, _ in curves})
    fig, axes = plt.subplots(1, len(metrics), figsize=(5 * len(metrics), 4), squeeze=False)
    for ax, metric in zip(axes[0], metrics):
        for (m, n, k), pts in sorted(curves.items()):
            if m != metric:
                continue
            lam, val = np.array(sorted(pts)).T
            ax.plot(np.log2(lam), val, label=f"n={n}, k={k}")
        ax.set_xlabel("log2 lambda")
        ax.set_title(metric)
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)
    print(args.output)


if __name__ == "__main__":
    main()
