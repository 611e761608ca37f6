#!/usr/bin/env python3
"""Render the spread-vs-cutoff figure (fixed horizon) from simulator CSVs.

Usage: plot_fig2.py --in <csv dir> --out fig2.png [--format png]

Overlays the dissipative series (solid) with the non-dissipative mu = 0
series (dashed) when both are present.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from series_io import SeriesFileError, discover_fig2  # noqa: E402

DPI = 150


def render_fig2(in_dir: str | Path, out_path: str | Path) -> Path:
    main_series, mu0 = discover_fig2(in_dir)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.loglog(main_series.col("gamma"), main_series.col("sigma"), "-",
              label="dissipative")
    if mu0 is not None:
        ax.loglog(mu0.col("gamma"), mu0.col("sigma"), "--", label="$\\mu = 0$")
    ax.set_xlabel("$\\gamma$ (s$^{-1}$)")
    ax.set_ylabel("$\\sigma$ (m)")
    ax.set_title("Spread vs noise cutoff at fixed horizon")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=DPI)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--in", dest="in_dir", required=True)
    ap.add_argument("--out", default="fig2.png")
    ap.add_argument("--format", default=None, help="image format override")
    args = ap.parse_args(argv)
    out = Path(args.out)
    if args.format:
        out = out.with_suffix("." + args.format.lstrip("."))
    try:
        path = render_fig2(args.in_dir, out)
    except SeriesFileError as exc:
        print(f"error: {exc}")
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
