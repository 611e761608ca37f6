"""Model parameters, derived quantities and parameter-file I/O.

All quantities are SI. ``hbar`` and ``k_B`` are ordinary fields so tests
can work in scaled units (hbar = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import DivergentTemperature

HBAR_SI = 1.054571817e-34  # J s
K_B_SI = 1.380649e-23      # J / K

_FIELDS = ("m", "lam", "mu", "omega", "gamma", "hbar", "k_B")
# key names used in parameter files (flat TOML)
_FILE_KEYS = {"m": "m", "lam": "lambda", "mu": "mu", "omega": "omega",
              "gamma": "gamma", "hbar": "hbar", "k_B": "k_B"}


@dataclass(frozen=True)
class ModelParams:
    """Physical constants and model parameters.

    m      : mass (kg)
    lam    : collapse rate (m^-2 s^-1)
    mu     : dissipation constant (m^2); mu = 0 is the non-dissipative limit
    omega  : oscillator frequency (s^-1)
    gamma  : noise frequency cutoff (s^-1)
    hbar   : reduced Planck constant (J s)
    k_B    : Boltzmann constant (J / K)
    """

    m: float
    lam: float
    mu: float = 0.0
    omega: float = 0.0
    gamma: float = 1.0
    hbar: float = HBAR_SI
    k_B: float = K_B_SI

    def __post_init__(self):
        for name in _FIELDS:
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.m <= 0:
            raise ValueError("m must be > 0")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.omega < 0:
            raise ValueError("omega must be >= 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.hbar <= 0:
            raise ValueError("hbar must be > 0")
        if self.k_B <= 0:
            raise ValueError("k_B must be > 0")

    def with_(self, **kw) -> "ModelParams":
        return replace(self, **kw)


def noise_temperature(p: ModelParams) -> float:
    """Temperature of the noise, hbar^2 / (4 m k_B mu).

    Raises DivergentTemperature at mu = 0 (infinite-temperature,
    non-dissipative limit; callers use the mu -> 0 pathway instead).
    """
    if p.mu == 0.0:
        raise DivergentTemperature("mu = 0: noise temperature diverges")
    return p.hbar**2 / (4.0 * p.m * p.k_B * p.mu)


def omega_eff_sq(p: ModelParams) -> float:
    """Effective squared frequency omega^2 - lambda^2 mu^2 (may be < 0)."""
    return p.omega**2 - (p.lam * p.mu) ** 2


def write_params(p: ModelParams, path: str | Path) -> None:
    """Write a flat key-value parameter file (valid TOML)."""
    lines = [f"{_FILE_KEYS[name]} = {getattr(p, name)!r}" for name in _FIELDS]
    Path(path).write_text("\n".join(lines) + "\n")


def params_from_mapping(d: dict) -> ModelParams:
    kw = {}
    for name in _FIELDS:
        key = _FILE_KEYS[name]
        if key in d:
            kw[name] = float(d[key])
    return ModelParams(**kw)


def parse_flat_config(text: str) -> dict:
    """Parse flat TOML-like 'key = value' lines.

    Values: numbers, quoted strings, or [v1, v2, ...] lists of numbers.
    '#' starts a comment; blank lines are skipped.
    """
    out: dict = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {ln}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if val.startswith("[") and val.endswith("]"):
            body = val[1:-1].strip()
            out[key] = [float(v) for v in body.split(",")] if body else []
        elif (val.startswith('"') and val.endswith('"')) or \
                (val.startswith("'") and val.endswith("'")):
            out[key] = val[1:-1]
        else:
            try:
                out[key] = int(val)
            except ValueError:
                out[key] = float(val)
    return out


def read_params(path: str | Path) -> ModelParams:
    """Read a flat key-value parameter file (TOML-like syntax, SI units)."""
    data = parse_flat_config(Path(path).read_text())
    return params_from_mapping(data)
