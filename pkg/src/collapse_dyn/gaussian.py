"""Gaussian wave packets under the propagator: spread, norm weight,
normalization and the per-horizon update

    alpha_t = At - B^2 / (4 (alpha_0 + A))
    beta_t  = D + (C + beta_0) B / (2 (alpha_0 + A))
    gamma_t = gamma_0 + E + (C + beta_0)^2 / (4 (alpha_0 + A))

for phi(x) = exp(-alpha x^2 + beta x + gamma). The spread sigma depends
only on (A, At, B), so it is deterministic: it never reads the noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegeneratePropagation, NormalizabilityLost
from .propagator import PropagatorCoeffs


@dataclass(frozen=True)
class GaussianState:
    """Unnormalized Gaussian wave function exp(-alpha x^2 + beta x + gamma)."""

    alpha: complex
    beta: complex = 0j
    gamma_phase: complex = 0j
    normalized: bool = False

    def __post_init__(self):
        a = complex(self.alpha)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValueError("alpha must be finite")
        if a.real <= 0:
            raise ValueError("Re(alpha) must be > 0 for normalizability")

    @property
    def phase_mod_2pi(self) -> float:
        return float(np.mod(self.gamma_phase.imag, 2.0 * np.pi))


def state_from_sigma(sigma0: float, beta: complex = 0j,
                     gamma_phase: complex = 0j) -> GaussianState:
    """Minimal-uncertainty packet of spread sigma0: alpha = 1/(4 sigma0^2)."""
    if sigma0 <= 0:
        raise ValueError("sigma0 must be positive")
    return GaussianState(alpha=1.0 / (4.0 * sigma0**2), beta=beta,
                         gamma_phase=gamma_phase)


def spread(state: GaussianState) -> float:
    """sigma = 1 / (2 sqrt(Re alpha))."""
    return 1.0 / (2.0 * math.sqrt(state.alpha.real))


def evolve(state0: GaussianState, c: PropagatorCoeffs) -> GaussianState:
    """Propagate through the Gaussian kernel; preserves the Gaussian form."""
    den = state0.alpha + c.A
    scale = max(abs(state0.alpha), abs(c.A), 1.0)
    if abs(den) < 1e-30 * scale:
        raise DegeneratePropagation(f"|alpha_0 + A| = {abs(den):.3e} too small")
    cb = c.C + state0.beta
    alpha_t = c.Atilde - c.B * c.B / (4.0 * den)
    beta_t = c.D + cb * c.B / (2.0 * den)
    gamma_t = state0.gamma_phase + c.E + cb * cb / (4.0 * den)
    if not np.isfinite(alpha_t.real) or alpha_t.real <= 0:
        raise NormalizabilityLost(f"Re(alpha_t) = {alpha_t.real:.6e} <= 0")
    return GaussianState(alpha=alpha_t, beta=beta_t, gamma_phase=gamma_t,
                         normalized=False)


def log_norm_weight(state: GaussianState) -> float:
    """log ||phi||^2, computed in log space to dodge overflow."""
    ar, br, gr = state.alpha.real, state.beta.real, state.gamma_phase.real
    return float(2.0 * gr + br * br / (2.0 * ar) + 0.5 * math.log(math.pi / (2.0 * ar)))


def norm_weight(state: GaussianState) -> float:
    """||phi||^2 = exp(2 Re gamma + (Re beta)^2/(2 Re alpha)) sqrt(pi/(2 Re alpha)).

    This is the probability weight attached to a trajectory when averaging
    under the physical measure.
    """
    return math.exp(log_norm_weight(state))


def normalize(state: GaussianState) -> GaussianState:
    """Rescale so ||phi|| = 1 (shifts Re gamma only)."""
    shift = 0.5 * log_norm_weight(state)
    return replace(state, gamma_phase=state.gamma_phase - shift, normalized=True)


def free_spread(t, m: float, sigma0: float, hbar: float):
    """Textbook free-particle spreading sigma0 sqrt(1 + (hbar t / 2 m sigma0^2)^2)."""
    t = np.asarray(t, dtype=float)
    x = hbar * t / (2.0 * m * sigma0**2)
    out = sigma0 * np.sqrt(1.0 + x * x)
    return out if out.ndim else float(out)


TRAJECTORY_HEADER = "t,sigma,re_alpha,im_alpha,re_beta,im_beta,log_norm"


def trajectory_row(t: float, state: GaussianState) -> str:
    return ",".join([
        f"{float(t)!r}", f"{spread(state)!r}",
        f"{float(state.alpha.real)!r}", f"{float(state.alpha.imag)!r}",
        f"{float(state.beta.real)!r}", f"{float(state.beta.imag)!r}",
        f"{log_norm_weight(state)!r}",
    ])


def write_trajectory(path, rows) -> None:
    """Write (t, GaussianState) pairs as a trajectory CSV."""
    with open(path, "w") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for t, state in rows:
            fh.write(trajectory_row(t, state) + "\n")
