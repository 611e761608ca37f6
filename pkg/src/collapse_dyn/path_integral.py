"""Brute-force reconstruction of the propagator exponent from the
discretized path integral.

The mid-point discretized action over nodes q_0..q_N (epsilon = t/N,
q evaluated at interval midpoints (q_k + q_{k-1})/2, velocities as
increments) is collected term by term into a quadratic form

    S_N[q] = (i/hbar) [ q . W q + L . q + const ],

which is partitioned into the interior Gaussian integral
exp(-X . M X + 2 X . Y) and the boundary exponent pieces. The Gaussian
integration then yields the exponent's quadratic form in (x0, x); no
determinant or normalization factor is computed.

M splits into the local tridiagonal part Mbar (kinetic + frequency) and
the dense memory part Mtilde (noise-kernel couplings); both symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .closed_form import solve_f, solve_g
from .errors import ContractViolation, SingularAction
from .kernels import CorrelationKernel, DriftKernelB, NoisePath, drive_A_path, zero_noise
from .params import ModelParams, omega_eff_sq
from .propagator import deterministic_coeffs


@dataclass(frozen=True)
class DiscretizedAction:
    """Quadratic/linear/constant data of the discretized action."""

    N: int
    epsilon: float
    Mbar: np.ndarray          # (N-1, N-1) tridiagonal symmetric
    Mtilde: np.ndarray        # (N-1, N-1) symmetric memory part
    y_const: np.ndarray       # Y = y_const + x0 y_a + x y_b
    y_a: np.ndarray
    y_b: np.ndarray
    bnd_x0sq: complex         # boundary exponent pieces, grouped by monomial
    bnd_xsq: complex
    bnd_cross: complex
    bnd_x0: complex
    bnd_x: complex
    bnd_const: complex

    @property
    def M(self) -> np.ndarray:
        return self.Mbar + self.Mtilde


@dataclass(frozen=True)
class QuadraticExponent:
    """Exponent coefficients: c_x0sq x0^2 + c_xsq x^2 + c_cross x0 x + ..."""

    c_x0sq: complex
    c_xsq: complex
    c_cross: complex
    c_x0: complex
    c_x: complex
    c_const: complex
    N: int


def build_action(p: ModelParams, kernel: CorrelationKernel, t: float, N: int,
                 noise: NoisePath | None = None) -> DiscretizedAction:
    """Assemble the discretized action on an N-subinterval grid.

    The noise path, when given, must be sampled on the same grid.
    """
    if N < 4:
        raise ValueError("need N >= 4 subintervals")
    grid = np.linspace(0.0, t, N + 1)
    eps = t / N
    if noise is None:
        noise = zero_noise(grid)
    elif noise.grid.shape != grid.shape or not np.allclose(noise.grid, grid, rtol=1e-12):
        raise ContractViolation("noise path grid does not match the action grid")

    m, lam, mu = p.m, p.lam, p.mu
    W2 = omega_eff_sq(p)
    wv = noise.values
    n_nodes = N + 1

    # midpoint-sum and increment stencils: (Pq)_k = q_k + q_{k-1},
    # (Dq)_k = q_k - q_{k-1}, k = 1..N
    P = np.zeros((N, n_nodes))
    Dm = np.zeros((N, n_nodes))
    rows = np.arange(N)
    P[rows, rows + 1] = 1.0
    P[rows, rows] = 1.0
    Dm[rows, rows + 1] = 1.0
    Dm[rows, rows] = -1.0

    # --- local quadratic part (tridiagonal): kinetic + sign-split drift + frequency
    W_loc = np.zeros((n_nodes, n_nodes), dtype=complex)
    # (m/2eps)(q_k - q_{k-1})^2
    W_loc += (0.5 * m / eps) * (Dm.T @ Dm)
    # -(m lam mu / 2)(q_k^2 - q_{k-1}^2): telescopes to the boundary
    W_loc[0, 0] += 0.5 * m * lam * mu
    W_loc[-1, -1] += -0.5 * m * lam * mu
    # -(eps m / 8) W2 (q_k + q_{k-1})^2
    W_loc += (-eps * m * W2 / 8.0) * (P.T @ P)

    # --- memory quadratic part
    W_mem = np.zeros((n_nodes, n_nodes), dtype=complex)
    if lam != 0.0:
        B = DriftKernelB(p, kernel)
        R, S = np.meshgrid(grid[1:], grid[1:], indexing="ij")
        Bmat = np.asarray(B(R, S), dtype=complex)   # B(t_j, t_k), j,k = 1..N
        Dmat = np.asarray(kernel(R, S), dtype=float)
        # (eps^2/4) sum_k sum_{j<=k} B_{j,k} (Pq)_k (Pq)_j
        Bhat = np.tril(Bmat.T)                      # row k, col j (j <= k): B(t_j, t_k)
        Qb = (eps * eps / 4.0) * (P.T @ Bhat @ P)
        W_mem += 0.5 * (Qb + Qb.T)
        if mu != 0.0:
            # -eps m lam mu sum_k sum_{j<=k} D_{j,k} (Pq)_k (Dq)_j
            Dhat = np.tril(Dmat.T)  # row k, col j (j <= k): D_{j,k}
            Qd = (-eps * m * lam * mu) * (P.T @ Dhat @ Dm)
            W_mem += 0.5 * (Qd + Qd.T)

    # --- linear part
    L = np.zeros(n_nodes, dtype=complex)
    if lam != 0.0:
        a_vals = drive_A_path(p, kernel, noise)
        # m sqrt(lam) mu w_k (q_k - q_{k-1})
        L += m * np.sqrt(lam) * mu * (Dm.T @ wv[1:])
        # -(eps/2) A_k (q_k + q_{k-1})
        L += -(0.5 * eps) * (P.T @ a_vals[1:])

    # --- constant part: (i/hbar) (m lam mu^2 / 2) int w^2 ds
    const = 0.5 * m * lam * mu**2 * np.trapezoid(wv**2, grid)

    ih = 1j / p.hbar
    Mbar = -ih * W_loc[1:-1, 1:-1]
    Mtilde = -ih * W_mem[1:-1, 1:-1]
    W_full = W_loc + W_mem
    return DiscretizedAction(
        N=N, epsilon=eps, Mbar=Mbar, Mtilde=Mtilde,
        y_a=ih * W_full[1:-1, 0], y_b=ih * W_full[1:-1, -1],
        y_const=0.5 * ih * L[1:-1],
        bnd_x0sq=complex(ih * W_full[0, 0]),
        bnd_xsq=complex(ih * W_full[-1, -1]),
        bnd_cross=complex(2.0 * ih * W_full[0, -1]),
        bnd_x0=complex(ih * L[0]),
        bnd_x=complex(ih * L[-1]),
        bnd_const=complex(ih * const),
    )


def integrate(action: DiscretizedAction) -> QuadraticExponent:
    """Carry out the interior Gaussian integral; exponent only."""
    M = action.M
    try:
        lu, piv = scipy.linalg.lu_factor(M)
        if np.min(np.abs(np.diag(lu))) == 0.0:
            raise SingularAction("M is singular")
        Z = scipy.linalg.lu_solve((lu, piv), np.stack(
            [action.y_a, action.y_b, action.y_const], axis=1))
    except scipy.linalg.LinAlgError as exc:
        raise SingularAction(str(exc)) from exc
    za, zb, zc = Z[:, 0], Z[:, 1], Z[:, 2]
    return QuadraticExponent(
        c_x0sq=complex(action.bnd_x0sq + action.y_a @ za),
        c_xsq=complex(action.bnd_xsq + action.y_b @ zb),
        c_cross=complex(action.bnd_cross + 2.0 * (action.y_a @ zb)),
        c_x0=complex(action.bnd_x0 + 2.0 * (action.y_a @ zc)),
        c_x=complex(action.bnd_x + 2.0 * (action.y_b @ zc)),
        c_const=complex(action.bnd_const + action.y_const @ zc),
        N=action.N,
    )


def exponent_at(action: DiscretizedAction, x0: float, x: float) -> complex:
    """Full exponent value at given endpoints (for consistency checks)."""
    Y = action.y_const + x0 * action.y_a + x * action.y_b
    z = scipy.linalg.solve(action.M, Y)
    bnd = (action.bnd_x0sq * x0**2 + action.bnd_xsq * x**2
           + action.bnd_cross * x0 * x + action.bnd_x0 * x0
           + action.bnd_x * x + action.bnd_const)
    return complex(bnd + Y @ z)


def compare_to_analytic(p: ModelParams, kernel: CorrelationKernel, t: float,
                        N_seq: tuple[int, ...] = (64, 128, 256, 512)) -> list[dict]:
    """Oracle vs analytic deterministic coefficients for each N.

    Requires the closed form's regime (exponential kernel, omega = 0,
    no noise). The analytic exponent coefficients are (-A, -Atilde, B).
    """
    if p.omega != 0.0:
        raise ContractViolation("analytic comparison requires omega = 0")
    f = solve_f(p, t)
    g = solve_g(p, t)
    A, Atilde, B = deterministic_coeffs(p, kernel, t, f, g)
    target = {"x0sq": -A, "xsq": -Atilde, "cross": B}
    report = []
    for N in N_seq:
        q = integrate(build_action(p, kernel, t, N))
        got = {"x0sq": q.c_x0sq, "xsq": q.c_xsq, "cross": q.c_cross}
        for name in ("x0sq", "xsq", "cross"):
            diff = got[name] - target[name]
            report.append({"N": N, "coef_name": name,
                           "re_err": diff.real, "im_err": diff.imag,
                           "abs_err": abs(diff), "target": target[name]})
    return report


def report_to_csv(report: list[dict], path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write("N,coef_name,re_err,im_err\n")
        for row in report:
            fh.write(f"{row['N']},{row['coef_name']},{row['re_err']!r},{row['im_err']!r}\n")
