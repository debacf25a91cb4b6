#!/usr/bin/env python
"""
Plot success rates of one or more benchmark files against the grid value.

    python tools/plot_benchmark.py run/d2.json run/d3.json -o rates.png
"""
import argparse
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import matplotlib  # noqa E402 isort:skip

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa E402 isort:skip

from cmps_tomo.utils.serialization import load_json, validate_document  # noqa E402 isort:skip


def main():
    parser = argparse.ArgumentParser(description="Plot benchmark success rates")
    parser.add_argument("files", nargs="+", metavar="FILE", help="benchmark JSON files")
    parser.add_argument("-o", "--out", default="benchmark.png", metavar="FILE")
    parser.add_argument("--linear", action="store_true", help="linear grid axis")
    args = parser.parse_args()

    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.files:
        doc = load_json(path)
        if validate_document(doc) != "benchmark":
            parser.error("{} is not a benchmark file".format(path))
        reports = doc["reports"]
        grid = [r["grid_value"] for r in reports]
        label = os.path.splitext(os.path.basename(path))[0]
        ax.plot(grid, [r["success_rate_mean_criterion"] for r in reports], "o-",
                label="{} (mean)".format(label))
        ax.plot(grid, [r["success_rate_max_criterion"] for r in reports], "s--",
                label="{} (max)".format(label))
    kind = reports[0]["kind"]
    if not args.linear and all(g > 0 for g in grid):
        ax.set_xscale("log")
    ax.set_xlabel("SNR" if kind == "noise_snr" else "epsilon")
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print("Wrote {}".format(args.out))


if __name__ == "__main__":
    main()
