#!/usr/bin/env python3
"""Render the spread-vs-time figure from simulator CSVs.

Usage: plot_fig1.py --in <csv dir> --out fig1.png [--format png]
"""

from __future__ import annotations

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from series_io import SeriesFileError, discover_fig1  # noqa: E402

DPI = 150


def render_fig1(in_dir: str | Path, out_path: str | Path) -> Path:
    series, mu0 = discover_fig1(in_dir)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for mu, sf in series:
        ax.loglog(sf.col("t"), sf.col("sigma"), label=f"$\\mu = {mu:.0e}$ m$^2$")
    if mu0 is not None:
        ax.loglog(mu0.col("t"), mu0.col("sigma"), "k--", lw=1.0, label="$\\mu = 0$")
    ax.set_xlabel("t (s)")
    ax.set_ylabel("$\\sigma$ (m)")
    ax.set_title("Spread vs time per dissipation strength")
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
    ap.add_argument("--out", default="fig1.png")
    ap.add_argument("--format", default=None, help="image format override")
    args = ap.parse_args(argv)
    out = Path(args.out)
    if args.format:
        out = out.with_suffix("." + args.format.lstrip("."))
    try:
        path = render_fig1(args.in_dir, out)
    except SeriesFileError as exc:
        print(f"error: {exc}")
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
