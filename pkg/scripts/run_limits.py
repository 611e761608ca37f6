#!/usr/bin/env python3
"""Run the limit-check suite (mu -> 0, white noise, free particle, oracle
triangle) and print one PASS/FAIL line per entry."""

import sys

from collapse_dyn.cli import main

if __name__ == "__main__":
    sys.exit(main(["limits", *sys.argv[1:]]))
