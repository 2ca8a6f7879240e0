"""Regenerate the bundled two-series demo CSV.

Hourly-like bivariate AR with daily (24) and weekly (168) seasonal lags, a
cross effect of the first series on the second, and absolute-value ARCH
errors. Deterministic for a given seed.
"""

import argparse
from pathlib import Path

import numpy as np

from hetlasso.csvio import write_panel_csv
from hetlasso.design import SeriesPanel

# (target, source, lag) -> coefficient
MEAN = {
    (0, 0, 1): 0.45, (0, 0, 24): 0.2, (0, 0, 168): 0.2, (0, 0, 169): -0.08,
    (1, 1, 1): 0.35, (1, 1, 24): 0.25, (1, 1, 168): 0.1, (1, 0, 1): 0.15, (1, 0, 24): -0.05,
}
LEVEL = (10.0, 3.0)
ARCH = ((0.05, 0.35, 0.25), (0.05, 0.3, 0.3))  # a0, lag 1, lag 24


def generate(T: int, seed: int, burn_in: int = 2000) -> np.ndarray:
    rng = np.random.default_rng(seed)
    total = T + burn_in
    z = rng.standard_normal((2, total))
    y = np.zeros((2, total))
    e = np.zeros((2, total))
    for t in range(total):
        for i in range(2):
            a0, a1, a24 = ARCH[i]
            s = a0 + a1 * abs(e[i, t - 1]) * (t >= 1) + a24 * abs(e[i, t - 24]) * (t >= 24)
            e[i, t] = s * z[i, t]
            acc = e[i, t]
            for (tgt, src, lag), c in MEAN.items():
                if tgt == i and t >= lag:
                    acc += c * y[src, t - lag]
            y[i, t] = acc
    mu = np.array(LEVEL)[:, None]
    return y[:, burn_in:] + mu


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--T", type=int, default=3000)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/hetlasso/data/two_series_demo.csv"))
    args = parser.parse_args()
    values = generate(args.T, args.seed)
    print(write_panel_csv(SeriesPanel(values, ("load", "price")), args.out))


if __name__ == "__main__":
    main()
