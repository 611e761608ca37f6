#!/usr/bin/env python3
"""Reproduce the spread-vs-time experiment with the package defaults.

Writes CSVs to out/fig1 (override with --out); render them afterwards via
plots/plot_fig1.py --in out/fig1 --out fig1.png
"""

import sys

from collapse_dyn.cli import main

if __name__ == "__main__":
    sys.exit(main(["fig1", *sys.argv[1:]]))
