"""Direct discretization of the non-local operator

    I[e](s) = (m/2) e''(s) + (m/2)(W2 + 4 lam mu D(s,s)) e(s)
              - (1/2) int_0^s B(r,s) e(r) dr - (1/2) int_s^t B(s,r) e(r) dr
              - m lam mu int_0^s dD(r,s)/dr e(r) dr
              - m lam mu int_s^t dD(r,s)/ds e(r) dr

on a uniform grid (2nd-order central differences, trapezoid weights), and
dense linear-system solution of the f, g, h and z boundary-value problems
for any kernel and any oscillator frequency.

Serves as the oracle for the closed form and as the only solver for h and
the harmonic case. The kernel's partial derivatives are discontinuous
across r = s for the exponential kernel; each sub-integral uses its own
one-sided limit at the shared node.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import ContractViolation, IllConditioned
from .kernels import CorrelationKernel, DriftKernelB, NoisePath, drive_A_path
from .params import ModelParams, omega_eff_sq

N_CAP = 4096
COND_LIMIT = 1e12


@dataclass(frozen=True)
class GridSolution:
    """Complex-valued solution samples on a uniform grid over [0, t]."""

    grid: np.ndarray
    values: np.ndarray
    role: str
    deriv0: complex
    deriv_t: complex

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            fh.write("s,re,im\n")
            for s, v in zip(self.grid, self.values):
                fh.write(f"{float(s)!r},{float(v.real)!r},{float(v.imag)!r}\n")


def _trapezoid_weights(n_nodes: int, h: float) -> np.ndarray:
    w = np.full(n_nodes, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _endpoint_derivatives(grid: np.ndarray, v: np.ndarray) -> tuple[complex, complex]:
    # 4th-order one-sided differences
    h = grid[1] - grid[0]
    c = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * h)
    d0 = np.dot(c, v[:5])
    dt = -np.dot(c, v[-1:-6:-1])
    return complex(d0), complex(dt)


def assemble_I(p: ModelParams, kernel: CorrelationKernel, grid: np.ndarray) -> np.ndarray:
    """Dense matrix realizing I on the interior rows (boundary rows identity).

    Row i (1 <= i <= N-1) applies the operator at s_i; rows 0 and N are
    placeholders overwritten by the boundary conditions of the solve.
    """
    grid = np.asarray(grid, dtype=float)
    N = grid.size - 1
    if N < 16:
        raise ValueError("need N >= 16 subintervals")
    h = grid[1] - grid[0]
    if not np.allclose(np.diff(grid), h, rtol=1e-10):
        raise ValueError("grid must be uniform")

    m, lam, mu = p.m, p.lam, p.mu
    W2 = omega_eff_sq(p)
    A = np.zeros((N + 1, N + 1), dtype=complex)

    idx = np.arange(N + 1)
    interior = idx[1:-1]

    # local part: (m/2) e'' + (m/2)(W2 + 4 lam mu D(s,s)) e
    diag_local = 0.5 * m * (W2 + 4.0 * lam * mu * np.asarray(kernel(grid, grid)))
    A[interior, interior] += -m / h**2 + diag_local[interior]
    A[interior, interior - 1] += 0.5 * m / h**2
    A[interior, interior + 1] += 0.5 * m / h**2

    if lam != 0.0:
        B = DriftKernelB(p, kernel)
        R, S = np.meshgrid(grid, grid, indexing="ij")  # R[j,i]=s_j, S[j,i]=s_i
        Bmat = np.asarray(B(R, S), dtype=complex)      # B(r_j, s_i)
        dDr = np.asarray(kernel.partial_r(R, S), dtype=float)  # dD/dr, one-sided r<s on diag
        dDs = np.asarray(kernel.partial_s(R, S), dtype=float)  # dD/ds, one-sided r>s on diag

        for i in interior:
            wl = _trapezoid_weights(i + 1, h)          # nodes 0..i
            wr = _trapezoid_weights(N - i + 1, h)      # nodes i..N
            # -(1/2) int_0^s B(r, s_i) e(r) dr
            A[i, :i + 1] += -0.5 * wl * Bmat[:i + 1, i]
            # -(1/2) int_s^t B(s_i, r) e(r) dr
            A[i, i:] += -0.5 * wr * Bmat[i, i:]
            if mu != 0.0:
                # -m lam mu int_0^s dD(r,s_i)/dr e(r) dr
                A[i, :i + 1] += -m * lam * mu * wl * dDr[:i + 1, i]
                # -m lam mu int_s^t dD(r,s_i)/ds e(r) dr
                A[i, i:] += -m * lam * mu * wr * dDs[i:, i]

    return A


def _solve(A: np.ndarray, rhs: np.ndarray, bc0: complex, bct: complex,
           role: str, grid: np.ndarray) -> GridSolution:
    A = A.copy()
    rhs = rhs.astype(complex).copy()
    A[0, :] = 0.0
    A[0, 0] = 1.0
    A[-1, :] = 0.0
    A[-1, -1] = 1.0
    rhs[0] = bc0
    rhs[-1] = bct

    scale = np.max(np.abs(A), axis=1)
    scale[scale == 0] = 1.0
    lu, piv = scipy.linalg.lu_factor(A / scale[:, None])
    u_diag = np.abs(np.diag(lu))
    if u_diag.min() == 0.0 or u_diag.max() / u_diag.min() > COND_LIMIT:
        raise IllConditioned(
            f"grid system condition estimate {u_diag.max() / max(u_diag.min(), 1e-300):.3e}")
    v = scipy.linalg.lu_solve((lu, piv), rhs / scale)
    d0, dt = _endpoint_derivatives(grid, v)
    return GridSolution(grid=grid, values=v, role=role, deriv0=d0, deriv_t=dt)


def make_grid(t: float, N: int) -> np.ndarray:
    if N > N_CAP:
        raise ValueError(f"N = {N} above cap {N_CAP}")
    return np.linspace(0.0, t, N + 1)


def _role_rhs(p: ModelParams, kernel: CorrelationKernel, grid: np.ndarray,
              role: str, noise: NoisePath | None) -> tuple[np.ndarray, complex, complex]:
    m, lam, mu = p.m, p.lam, p.mu
    if role == "f":
        return m * lam * mu * np.asarray(kernel(0.0, grid), dtype=complex), 1.0, 0.0
    if role == "g":
        return np.zeros(grid.size, dtype=complex), 0.0, 1.0
    if role == "h":
        if noise is None:
            raise ContractViolation("role h needs a noise path")
        if noise.grid.shape != grid.shape or not np.allclose(noise.grid, grid, rtol=1e-12):
            raise ContractViolation("noise path grid does not match the solver grid")
        a_vals = drive_A_path(p, kernel, noise)
        wdot = noise.derivative()
        return (-0.5 * m * np.sqrt(lam) * mu * wdot - 0.5 * a_vals), 0.0, 0.0
    raise ValueError(f"unknown role {role!r}")


def solve_role(p: ModelParams, kernel: CorrelationKernel, t: float, role: str,
               N: int = 512, noise: NoisePath | None = None) -> GridSolution:
    """Solve the f, g or h boundary-value problem on an (N+1)-node grid.

    f: I[f] = m lam mu D(0,s),                     f(0)=1, f(t)=0
    g: I[g] = 0,                                   g(0)=0, g(t)=1
    h: I[h] = -(m sqrt(lam) mu / 2) w'(s) - A(s)/2, h(0)=h(t)=0
    """
    grid = make_grid(t, N)
    A = assemble_I(p, kernel, grid)
    rhs, bc0, bct = _role_rhs(p, kernel, grid, role, noise)
    return _solve(A, rhs, bc0, bct, role, grid)


def solve_z(p: ModelParams, kernel: CorrelationKernel, t: float,
            x0: float, x: float, noise: NoisePath | None = None,
            N: int = 512) -> GridSolution:
    """Stationary path z with z(0)=x0, z(t)=x; equals f x0 + g x + h."""
    grid = make_grid(t, N)
    A = assemble_I(p, kernel, grid)
    rhs_f, _, _ = _role_rhs(p, kernel, grid, "f", None)
    if noise is None:
        rhs_h = np.zeros(grid.size, dtype=complex)
    else:
        rhs_h, _, _ = _role_rhs(p, kernel, grid, "h", noise)
    rhs = x0 * rhs_f + rhs_h
    return _solve(A, rhs, x0, x, "z", grid)
