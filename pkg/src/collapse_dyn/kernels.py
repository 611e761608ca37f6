"""Noise correlation kernels D(t,s), the drift kernel B(r,s), colored-noise
sampling and the noise drive A(s).

Kernels are immutable and shareable. Sampling takes an explicit seed and is
reentrant (no hidden global RNG state).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special

from .errors import DomainError, KernelNotPSD, NumericsError
from .params import ModelParams

PSD_REPAIR_TOL = 1e-12  # eigenvalues in [-tol*trace, 0) are clamped to 0


class CorrelationKernel:
    """Base class: symmetric correlation density D(t,s) with unit area."""

    def __call__(self, t, s):
        raise NotImplementedError

    def partial_r(self, r, s):
        """dD(r,s)/dr; at r = s the one-sided limit from r < s."""
        raise NotImplementedError

    def partial_s(self, r, s):
        """dD(r,s)/ds; at r = s the one-sided limit from r > s."""
        raise NotImplementedError

    def pair_integral(self, r, s):
        """Q(r,s) = int_0^r D(r,x) D(s,x) dx (enters the drift kernel B)."""
        raise NotImplementedError

    def cov(self, grid: np.ndarray) -> np.ndarray:
        g = np.asarray(grid, dtype=float)
        return np.asarray(self(g[:, None], g[None, :]), dtype=float)


@dataclass(frozen=True)
class Exponential(CorrelationKernel):
    """D(t,s) = (gamma/2) exp(-gamma |t-s|), the frequency-cutoff kernel."""

    gamma: float

    def __call__(self, t, s):
        return 0.5 * self.gamma * np.exp(-self.gamma * np.abs(t - s))

    def partial_r(self, r, s):
        # +gamma D below the diagonal (r < s), -gamma D above; one-sided
        # limit from r < s on the diagonal itself.
        sgn = np.where(np.asarray(r) <= np.asarray(s), 1.0, -1.0)
        return sgn * self.gamma * self(r, s)

    def partial_s(self, r, s):
        # dD/ds = -dD/dr away from the diagonal; one-sided from r > s.
        sgn = np.where(np.asarray(r) >= np.asarray(s), 1.0, -1.0)
        return sgn * self.gamma * self(r, s)

    def pair_integral(self, r, s):
        r = np.asarray(r, dtype=float)
        s = np.asarray(s, dtype=float)
        g = self.gamma
        a = np.abs(r - s)
        base = (g / 8.0) * (np.exp(-g * a) - np.exp(-g * (r + s)))
        flat = (g * g / 4.0) * np.maximum(r - s, 0.0) * np.exp(-g * a)
        return base + flat


@dataclass(frozen=True)
class DeltaApprox(CorrelationKernel):
    """Narrow Gaussian bump of width 1/gamma approximating delta(t-s).

    Smooth everywhere (no diagonal kink), positive definite on any grid;
    int D(s,r) phi(r) dr = phi(s) + O(1/gamma^2) for smooth phi.
    """

    gamma: float

    def __call__(self, t, s):
        u = np.asarray(t) - np.asarray(s)
        return self.gamma / np.sqrt(2.0 * np.pi) * np.exp(-0.5 * (self.gamma * u) ** 2)

    def partial_r(self, r, s):
        return -self.gamma**2 * (np.asarray(r) - np.asarray(s)) * self(r, s)

    def partial_s(self, r, s):
        return self.gamma**2 * (np.asarray(r) - np.asarray(s)) * self(r, s)

    def pair_integral(self, r, s):
        r = np.asarray(r, dtype=float)
        s = np.asarray(s, dtype=float)
        g = self.gamma
        pref = g / (4.0 * np.sqrt(np.pi)) * np.exp(-0.25 * (g * (r - s)) ** 2)
        return pref * (special.erf(0.5 * g * (r - s)) + special.erf(0.5 * g * (r + s)))


@dataclass(frozen=True)
class Tabulated(CorrelationKernel):
    """Kernel given by samples D(grid_i, grid_j) with bilinear interpolation."""

    grid: np.ndarray
    values: np.ndarray  # (n, n), symmetric

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or np.any(np.diff(g) <= 0):
            raise ValueError("tabulation grid must be strictly increasing")
        if v.shape != (g.size, g.size):
            raise ValueError("values must be (n, n) on the grid")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", 0.5 * (v + v.T))

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.grid[0] - 1e-12) or np.any(x > self.grid[-1] + 1e-12):
            raise DomainError("lookup outside tabulation domain")
        return np.clip(x, self.grid[0], self.grid[-1])

    def __call__(self, t, s):
        t = self._check(t)
        s = self._check(s)
        t, s = np.broadcast_arrays(t, s)
        out = np.empty(t.shape, dtype=float)
        it = np.nditer([t, s, out], op_flags=[["readonly"], ["readonly"], ["writeonly"]])
        g, v = self.grid, self.values
        for ti, si, oi in it:
            i = min(np.searchsorted(g, ti) - 1, g.size - 2)
            j = min(np.searchsorted(g, si) - 1, g.size - 2)
            i, j = max(i, 0), max(j, 0)
            u = (ti - g[i]) / (g[i + 1] - g[i])
            w = (si - g[j]) / (g[j + 1] - g[j])
            oi[...] = ((1 - u) * (1 - w) * v[i, j] + u * (1 - w) * v[i + 1, j]
                       + (1 - u) * w * v[i, j + 1] + u * w * v[i + 1, j + 1])
        return out if out.ndim else float(out)

    def _fd_step(self):
        return float(np.min(np.diff(self.grid)))

    def partial_r(self, r, s):
        h = self._fd_step()
        lo, hi = self.grid[0], self.grid[-1]
        r = np.asarray(r, dtype=float)
        rp = np.minimum(r + 0.5 * h, hi)
        rm = np.maximum(r - 0.5 * h, lo)
        return (self(rp, s) - self(rm, s)) / (rp - rm)

    def partial_s(self, r, s):
        h = self._fd_step()
        lo, hi = self.grid[0], self.grid[-1]
        s = np.asarray(s, dtype=float)
        sp = np.minimum(s + 0.5 * h, hi)
        sm = np.maximum(s - 0.5 * h, lo)
        return (self(r, sp) - self(r, sm)) / (sp - sm)

    def pair_integral(self, r, s):
        from scipy.integrate import quad

        def one(rr, ss):
            if rr <= 0:
                return 0.0
            val, err = quad(lambda x: self(rr, x) * self(ss, x), 0.0, rr, limit=200)
            if not np.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
                raise NumericsError("pair-integral quadrature did not converge")
            return val

        r = np.asarray(r, dtype=float)
        s = np.asarray(s, dtype=float)
        rb, sb = np.broadcast_arrays(r, s)
        out = np.array([one(rr, ss) for rr, ss in zip(rb.ravel(), sb.ravel())])
        return out.reshape(rb.shape) if rb.ndim else float(out[0])


def eval_D(kernel: CorrelationKernel, t, s):
    """Correlation density D(t,s)."""
    return kernel(t, s)


@dataclass(frozen=True)
class DriftKernelB:
    """B(r,s) = (2 m lam^2 mu^2 + 2 i hbar lam) D(r,s)
               + 4 m lam^2 mu^2 int_0^r D(r,x) D(s,x) dx.

    Not symmetric in (r,s); at mu = 0 it reduces to 2 i hbar lam D(r,s)
    exactly (the second term carries mu^2).
    """

    params: ModelParams
    kernel: CorrelationKernel

    def __call__(self, r, s):
        p = self.params
        if p.lam == 0.0:
            return np.zeros(np.broadcast(np.asarray(r), np.asarray(s)).shape, dtype=complex) \
                if np.ndim(r) or np.ndim(s) else 0j
        c_local = 2.0 * p.m * (p.lam * p.mu) ** 2 + 2j * p.hbar * p.lam
        out = c_local * np.asarray(self.kernel(r, s), dtype=complex)
        if p.mu != 0.0:
            out = out + 4.0 * p.m * (p.lam * p.mu) ** 2 * self.kernel.pair_integral(r, s)
        return out


def eval_B(b: DriftKernelB, r, s):
    """Drift kernel value B(r,s) (complex)."""
    return b(r, s)


@dataclass(frozen=True)
class NoisePath:
    """A sampled realization w(t_k) on an ordered grid, with its seed."""

    grid: np.ndarray
    values: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.size < 2 or np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing with >= 2 nodes")
        if v.shape != g.shape or not np.all(np.isfinite(v)):
            raise ValueError("values must be finite and match the grid")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def derivative(self) -> np.ndarray:
        """dw/dt by central differences, one-sided (2nd order) at the ends."""
        return _grid_derivative(self.grid, self.values)

    def index_of(self, s: float) -> int:
        i = int(np.argmin(np.abs(self.grid - s)))
        h = np.min(np.diff(self.grid))
        if abs(self.grid[i] - s) > 1e-9 * max(h, abs(s)):
            raise DomainError(f"time {s} is not a grid node")
        return i

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            fh.write("time,w\n")
            for t, w in zip(self.grid, self.values):
                fh.write(f"{float(t)!r},{float(w)!r}\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "NoisePath":
        raw = np.genfromtxt(path, delimiter=",", names=True)
        if raw.dtype.names != ("time", "w"):
            raise ValueError(f"expected header 'time,w' in {path}")
        return cls(grid=np.atleast_1d(raw["time"]), values=np.atleast_1d(raw["w"]))


def _grid_derivative(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    out[1:-1] = (values[2:] - values[:-2]) / (grid[2:] - grid[:-2])
    h0 = grid[1] - grid[0]
    h1 = grid[2] - grid[1]
    if abs(h1 - h0) < 1e-12 * h0:  # uniform: 2nd-order one-sided
        out[0] = (-3 * values[0] + 4 * values[1] - values[2]) / (2 * h0)
        hN = grid[-1] - grid[-2]
        out[-1] = (3 * values[-1] - 4 * values[-2] + values[-3]) / (2 * hN)
    else:
        out[0] = (values[1] - values[0]) / h0
        out[-1] = (values[-1] - values[-2]) / (grid[-1] - grid[-2])
    return out


def covariance_matrix(kernel: CorrelationKernel, grid) -> np.ndarray:
    return kernel.cov(np.asarray(grid, dtype=float))


def sample_noise(kernel: CorrelationKernel, grid, seed: int) -> NoisePath:
    """Zero-mean Gaussian path with covariance D(t_i, t_j) on the grid.

    Uses a covariance factorization (Cholesky; symmetric eigendecomposition
    with PSD repair as fallback), so it is exact at the nodes for any
    kernel. Deterministic given the seed.
    """
    g = np.asarray(grid, dtype=float)
    cov = covariance_matrix(kernel, g)
    try:
        L = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        evals, vecs = np.linalg.eigh(cov)
        floor = -PSD_REPAIR_TOL * np.trace(cov)
        if np.min(evals) < floor:
            raise KernelNotPSD(
                f"min eigenvalue {np.min(evals):.3e} below repair floor {floor:.3e}")
        L = vecs * np.sqrt(np.clip(evals, 0.0, None))
    z = np.random.default_rng(seed).standard_normal(g.size)
    return NoisePath(grid=g, values=L @ z, seed=seed)


def zero_noise(grid) -> NoisePath:
    g = np.asarray(grid, dtype=float)
    return NoisePath(grid=g, values=np.zeros_like(g), seed=None)


def drive_A_path(p: ModelParams, kernel: CorrelationKernel, w: NoisePath) -> np.ndarray:
    """A(s) on all grid nodes of the path.

    A(s) = i hbar sqrt(lam) w(s) + m lam^{3/2} mu^2 w(s)
           + 2 m lam^{3/2} mu^2 int_0^s D(r,s) w(r) dr,
    memory term by trapezoid over the path's grid.
    """
    g, v = w.grid, w.values
    lam32 = p.lam ** 1.5
    out = (1j * p.hbar * np.sqrt(p.lam) + p.m * lam32 * p.mu**2) * v.astype(complex)
    if p.mu != 0.0 and p.lam != 0.0:
        n = g.size
        mem = np.empty(n)
        mem[0] = 0.0
        for k in range(1, n):
            integrand = np.asarray(kernel(g[:k + 1], g[k])) * v[:k + 1]
            mem[k] = np.trapezoid(integrand, g[:k + 1])
        out = out + 2.0 * p.m * lam32 * p.mu**2 * mem
    return out


def drive_A(p: ModelParams, kernel: CorrelationKernel, w: NoisePath, s: float) -> complex:
    """A(s) at a single grid node s of the path."""
    i = w.index_of(s)
    return complex(drive_A_path(p, kernel, w)[i])
