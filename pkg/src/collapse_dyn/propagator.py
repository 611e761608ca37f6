"""Green's-function coefficients assembled from f, g, h and a noise path.

The propagator exponent is  -A x0^2 - At x^2 + B x0 x + C x0 + D x + E
with k = i m / (2 hbar) and

    A  =  k ( f'(0) - lam mu - 2 lam mu int_0^t D(0,s) f(s) ds )
    At = -k ( g'(t) - lam mu )
    B  =  k ( f'(t) - g'(0) + 2 lam mu int_0^t D(0,s) g(s) ds )
    C  = -k ( h'(0) + 2 sqrt(lam) mu w(0) + sqrt(lam) mu int w' f
              + int (A(s)/m) f - 2 lam mu int D(0,s) h )
    D  =  k ( h'(t) + 2 sqrt(lam) mu w(t) - sqrt(lam) mu int w' g
              - int (A(s)/m) g )
    E  = -k ( sqrt(lam) mu int w' h + int (A(s)/m) h
              - lam mu^2 int w^2 )

(A, At, B) are deterministic; (C, D, E) are random processes through w.
The overall normalization (the determinant factor) is not computed;
states are renormalized downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .closed_form import ClosedFormSolution
from .errors import ContractViolation
from .grid_bvp import GridSolution
from .kernels import CorrelationKernel, NoisePath, drive_A_path
from .params import ModelParams

MIN_QUAD_NODES = 512


@dataclass(frozen=True)
class PropagatorCoeffs:
    """The six exponent coefficients at horizon t."""

    A: complex
    Atilde: complex
    B: complex
    C: complex
    D: complex
    E: complex
    t: float
    k: complex

    def dump_row(self) -> str:
        vals = [self.A, self.Atilde, self.B, self.C, self.D, self.E]
        cells = [f"{float(self.t)!r}"]
        for v in vals:
            cells += [f"{float(v.real)!r}", f"{float(v.imag)!r}"]
        return ",".join(cells)


CSV_HEADER = ("t,re_A,im_A,re_Atilde,im_Atilde,re_B,im_B,"
              "re_C,im_C,re_D,im_D,re_E,im_E")


def dump_coeffs(rows: list[PropagatorCoeffs], path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for c in rows:
            fh.write(c.dump_row() + "\n")


def _solution_samples(sol, grid: np.ndarray, t: float):
    """(values on grid, derivative at 0, derivative at t) for either source."""
    if isinstance(sol, ClosedFormSolution):
        if abs(sol.horizon - t) > 1e-12 * max(t, 1.0):
            raise ContractViolation("solution horizon does not match t")
        d0, dt = sol.endpoint_derivatives
        return np.asarray(sol.eval(grid, 0)), d0, dt
    if isinstance(sol, GridSolution):
        if abs(sol.horizon - t) > 1e-12 * max(t, 1.0):
            raise ContractViolation("solution horizon does not match t")
        if sol.grid.shape != grid.shape or not np.allclose(sol.grid, grid, rtol=1e-12):
            raise ContractViolation("solution grid does not match the quadrature grid")
        return sol.values, sol.deriv0, sol.deriv_t
    raise TypeError(f"unsupported solution type {type(sol)!r}")


def _quad_grid(f_sol, g_sol, t: float, gamma: float,
               n_min: int = MIN_QUAD_NODES) -> np.ndarray:
    """Trapezoid nodes for the D(0,s)-weighted integrals.

    Grid solutions fix the nodes. For closed-form solutions the weight
    exp(-gamma s) concentrates near s = 0 when gamma t >> 1, so the grid
    splits there: n_min nodes on [0, 40/gamma] plus n_min on the tail.
    """
    for sol in (f_sol, g_sol):
        if isinstance(sol, GridSolution):
            return sol.grid
    n = max(n_min, 2)
    cut = 40.0 / gamma
    if cut >= t:
        return np.linspace(0.0, t, 2 * n + 1)
    head = np.linspace(0.0, cut, n + 1)
    tail = np.linspace(cut, t, n + 1)
    return np.concatenate([head, tail[1:]])


def deterministic_coeffs(p: ModelParams, kernel: CorrelationKernel, t: float,
                         f_sol, g_sol,
                         quad_nodes: int = MIN_QUAD_NODES) -> tuple[complex, complex, complex]:
    """(A, Atilde, B); never reads a noise path."""
    grid = _quad_grid(f_sol, g_sol, t, p.gamma, n_min=quad_nodes)
    f_vals, fd0, fdt = _solution_samples(f_sol, grid, t)
    g_vals, gd0, gdt = _solution_samples(g_sol, grid, t)
    k = 1j * p.m / (2.0 * p.hbar)
    lm = p.lam * p.mu
    d0s = np.asarray(kernel(0.0, grid))
    int_df = np.trapezoid(d0s * f_vals, grid)
    int_dg = np.trapezoid(d0s * g_vals, grid)
    A = k * (fd0 - lm - 2.0 * lm * int_df)
    Atilde = -k * (gdt - lm)
    B = k * (fdt - gd0 + 2.0 * lm * int_dg)
    return A, Atilde, B


def stochastic_coeffs(p: ModelParams, kernel: CorrelationKernel, t: float,
                      f_sol, g_sol, h_sol: GridSolution,
                      w: NoisePath) -> tuple[complex, complex, complex]:
    """(C, D, E) on the noise path's grid (h must live on the same grid)."""
    if not isinstance(h_sol, GridSolution):
        raise TypeError("h must come from the grid BVP")
    grid = h_sol.grid
    if w.grid.shape != grid.shape or not np.allclose(w.grid, grid, rtol=1e-12):
        raise ContractViolation("noise grid does not match h's grid")
    f_vals, _, _ = _solution_samples(f_sol, grid, t)
    g_vals, _, _ = _solution_samples(g_sol, grid, t)
    h_vals, hd0, hdt = h_sol.values, h_sol.deriv0, h_sol.deriv_t

    k = 1j * p.m / (2.0 * p.hbar)
    slm = np.sqrt(p.lam) * p.mu
    lm = p.lam * p.mu
    wdot = w.derivative()
    a_over_m = drive_A_path(p, kernel, w) / p.m
    d0s = np.asarray(kernel(0.0, grid))

    C = -k * (hd0 + 2.0 * slm * w.values[0]
              + slm * np.trapezoid(wdot * f_vals, grid)
              + np.trapezoid(a_over_m * f_vals, grid)
              - 2.0 * lm * np.trapezoid(d0s * h_vals, grid))
    D = k * (hdt + 2.0 * slm * w.values[-1]
             - slm * np.trapezoid(wdot * g_vals, grid)
             - np.trapezoid(a_over_m * g_vals, grid))
    E = -k * (slm * np.trapezoid(wdot * h_vals, grid)
              + np.trapezoid(a_over_m * h_vals, grid)
              - p.lam * p.mu**2 * np.trapezoid(w.values**2, grid))
    return C, D, E


def propagator_coeffs(p: ModelParams, kernel: CorrelationKernel, t: float,
                      f_sol, g_sol, h_sol: GridSolution | None = None,
                      w: NoisePath | None = None,
                      quad_nodes: int = MIN_QUAD_NODES) -> PropagatorCoeffs:
    """Assemble all six coefficients; without noise, (C, D, E) = 0."""
    A, Atilde, B = deterministic_coeffs(p, kernel, t, f_sol, g_sol, quad_nodes=quad_nodes)
    if w is None or h_sol is None:
        C = D = E = 0j
    else:
        C, D, E = stochastic_coeffs(p, kernel, t, f_sol, g_sol, h_sol, w)
    return PropagatorCoeffs(A=A, Atilde=Atilde, B=B, C=C, D=D, E=E,
                            t=t, k=1j * p.m / (2.0 * p.hbar))
