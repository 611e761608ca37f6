#!/usr/bin/env python3
"""Reproduce the spread-vs-cutoff experiment with the package defaults.

Writes CSVs to out/fig2 (override with --out); render them afterwards via
plots/plot_fig2.py --in out/fig2 --out fig2.png
"""

import sys

from collapse_dyn.cli import main

if __name__ == "__main__":
    sys.exit(main(["fig2", *sys.argv[1:]]))
