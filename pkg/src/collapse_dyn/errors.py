"""Exception types shared across the package."""


class CollapseDynError(Exception):
    """Base class for all package errors."""


class DivergentTemperature(CollapseDynError):
    """mu = 0: the noise temperature is infinite; use the mu -> 0 pathway."""


class DomainError(CollapseDynError):
    """Evaluation outside a kernel's tabulation domain."""


class NumericsError(CollapseDynError):
    """A quadrature or iteration failed to converge."""


class KernelNotPSD(CollapseDynError):
    """Covariance matrix is indefinite beyond the repair tolerance."""


class UnsupportedRegime(CollapseDynError):
    """Parameter regime not covered by this solver (e.g. omega != 0 in the
    closed form); route the caller to the grid BVP."""


class IllConditioned(CollapseDynError):
    """Linear system condition number above 1e12."""


class SingularAction(CollapseDynError):
    """Gaussian integration matrix M is singular."""


class ContractViolation(CollapseDynError):
    """Mismatched horizons or grids between coupled inputs."""


class DegeneratePropagation(CollapseDynError):
    """|alpha_0 + A_t| too small to propagate a Gaussian state."""


class NormalizabilityLost(CollapseDynError):
    """Evolved state has Re(alpha) <= 0; parameters or tolerances failed."""


class Unsupported(CollapseDynError):
    """Requested operation outside the supported range (e.g. derivative
    order > 3)."""
