"""Series-file loading and validation shared by the plot scripts.

The plots consume only the simulator's CSV contracts; they never import
the simulation package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SeriesFileError(Exception):
    """Missing, malformed or non-finite series data."""


@dataclass(frozen=True)
class SeriesFile:
    path: Path
    columns: tuple[str, ...]
    data: np.ndarray  # (n_rows, n_cols)

    def col(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]


def load_series(path: str | Path, expect_header: str) -> SeriesFile:
    path = Path(path)
    if not path.exists():
        raise SeriesFileError(f"missing series file: {path}")
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != expect_header:
        raise SeriesFileError(
            f"{path}: expected header {expect_header!r}, got "
            f"{lines[0].strip() if lines else '<empty>'!r}")
    cols = tuple(expect_header.split(","))
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise SeriesFileError(f"{path}: non-numeric cell ({exc})") from exc
    if data.ndim != 2 or data.shape[1] != len(cols) or data.shape[0] == 0:
        raise SeriesFileError(f"{path}: expected rows of {len(cols)} columns")
    if not np.all(np.isfinite(data)):
        raise SeriesFileError(f"{path}: non-finite values")
    return SeriesFile(path=path, columns=cols, data=data)


_MU_RE = re.compile(r"fig1_mu_([0-9.eE+-]+)\.csv$")


def discover_fig1(directory: str | Path) -> tuple[list[tuple[float, SeriesFile]], SeriesFile | None]:
    """All per-mu series (sorted by mu) plus the mu = 0 overlay if present."""
    directory = Path(directory)
    series = []
    for path in sorted(directory.glob("fig1_mu_*.csv")):
        m = _MU_RE.search(path.name)
        if not m:
            raise SeriesFileError(f"cannot parse mu from file name {path.name}")
        series.append((float(m.group(1)), load_series(path, "t,sigma")))
    if not series:
        raise SeriesFileError(f"no fig1_mu_*.csv files in {directory}")
    series.sort(key=lambda kv: kv[0])
    mu0_path = directory / "fig1_mu0.csv"
    mu0 = load_series(mu0_path, "t,sigma") if mu0_path.exists() else None
    return series, mu0


def discover_fig2(directory: str | Path) -> tuple[SeriesFile, SeriesFile | None]:
    directory = Path(directory)
    main = load_series(directory / "fig2_sigma_vs_gamma.csv", "gamma,sigma")
    mu0_path = directory / "fig2_sigma_vs_gamma_mu0.csv"
    mu0 = load_series(mu0_path, "gamma,sigma") if mu0_path.exists() else None
    return main, mu0
