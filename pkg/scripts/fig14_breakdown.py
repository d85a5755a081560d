"""Energy breakdown per tuning technology at each configuration's N_ltd.

Writes a CSV (or prints it) and optionally a stacked-bar PNG when
matplotlib is installed.
"""

import argparse
import sys

from photomac.catalog import SimConfig
from photomac.cli import to_csv, write_atomic
from photomac.figures import emit_figure_data


def plot(data, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    parts = [c for c in data.columns if c.endswith("_fj") and c != "total_fj"]
    fig, axes = plt.subplots(1, 2, figsize=(12, 4), sharey=True)
    for ax, arch in zip(axes, ("mzm", "mrr")):
        rows = [r for r in data.rows if r[0] == arch]
        labels = [f"{r[1]}\n{r[2]}b" for r in rows]
        bottom = [0.0] * len(rows)
        for j, name in enumerate(parts):
            vals = [r[4 + j] for r in rows]
            ax.bar(range(len(rows)), vals, bottom=bottom, label=name[:-3])
            bottom = [b + v for b, v in zip(bottom, vals)]
        ax.set_xticks(range(len(rows)), labels, fontsize=6, rotation=90)
        ax.set_yscale("log")
        ax.set_title(arch.upper())
    axes[0].set_ylabel("fJ/Op")
    axes[1].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", help="CSV path (stdout if omitted)")
    ap.add_argument("--png", help="also save a stacked bar chart")
    ap.add_argument("--alpha-w", type=float, default=4096.0)
    args = ap.parse_args()

    base = SimConfig().with_(responsivity=1.2)
    base = base.with_(tunings=type(base.tunings)(alpha_w=args.alpha_w))
    data = emit_figure_data("fig14", base)
    text = to_csv(data.columns, data.rows)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    if args.png:
        plot(data, args.png)


if __name__ == "__main__":
    main()
