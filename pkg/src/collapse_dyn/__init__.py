"""Non-Markovian dissipative collapse dynamics for a free particle:
Gaussian propagator coefficients, wave-packet spread evolution, and
cross-validating numerical oracles."""

from .params import ModelParams, noise_temperature, omega_eff_sq, read_params, write_params
from .kernels import (CorrelationKernel, Exponential, DeltaApprox, Tabulated,
                      DriftKernelB, NoisePath, eval_D, eval_B, sample_noise,
                      zero_noise, drive_A, drive_A_path, covariance_matrix)
from .closed_form import (CharacteristicRoots, ClosedFormSolution,
                          characteristic_roots, solve_f, solve_g,
                          quartic_residual, residual_on_grid)
from . import errors

__all__ = [
    "ModelParams", "noise_temperature", "omega_eff_sq", "read_params", "write_params",
    "CorrelationKernel", "Exponential", "DeltaApprox", "Tabulated", "DriftKernelB",
    "NoisePath", "eval_D", "eval_B", "sample_noise", "zero_noise", "drive_A",
    "drive_A_path", "covariance_matrix",
    "CharacteristicRoots", "ClosedFormSolution", "characteristic_roots",
    "solve_f", "solve_g", "quartic_residual", "residual_on_grid",
    "errors",
]

__version__ = "0.1.0"
