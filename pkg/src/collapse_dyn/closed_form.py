"""Analytic solution of the f and g boundary-value problems for the
exponential kernel and a free particle (omega = 0).

The reduced integro-differential equation for e in {f, g} is

    e''(s) + W2 e(s) - c1 J1[e](s) + c2 exp(-gamma s) F0[e]
        + lmg K1[e](s) + lmg (exp(-gamma s) e(0) + exp(-gamma (t-s)) e(t))
        = rhs_role(s),

with W2 = -(lam mu)^2, c1 = gamma (3 lam^2 mu^2 / 2 + i hbar lam / m),
c2 = lam^2 mu^2 gamma / 2, lmg = lam mu gamma,
J1[e](s) = int_0^t exp(-gamma|s-r|) e(r) dr,
F0[e]    = int_0^t exp(-gamma r) e(r) dr,
K1[e](s) = int_0^s exp(-gamma(s-r)) e'(r) dr - int_s^t exp(-gamma(r-s)) e'(r) dr,
rhs_f(s) = lmg exp(-gamma s), rhs_g = 0.

Differentiating twice maps any solution onto the quartic ODE

    e'''' + (W2 + 2 lmg - gamma^2) e'' + (4 lam^2 mu^2 gamma^2
        + 2 i hbar lam gamma^2 / m) e = 0,

and conversely a quartic solution satisfies the full equation iff the
residual vanishes at s = 0 and s = t (the residual obeys r'' = gamma^2 r,
so two zeros force r = 0). The boundary system therefore consists of the
two value conditions plus the full equation evaluated at the endpoints;
all integrals are exact on the exponential/hyperbolic basis.

Basis functions are stored in overflow-safe form: exp(v(s-t)) and
exp(-v s) pairs for |v| t >= 1/2, and sinh(v s)/v, cosh(v s) pairs below
(series-evaluated moments), so root collisions and the lam -> 0 limit
degrade gracefully. omega != 0 is routed to the grid BVP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import IllConditioned, NumericsError, Unsupported, UnsupportedRegime
from .params import ModelParams, omega_eff_sq

DEGENERACY_THRESHOLD = 1e-6   # on |v| t and |v1 - v2| t
SMALL_ARG = 0.5               # |v| t below this uses the sinh/cosh series basis
COND_LIMIT = 1e12
_SERIES_TERMS = 9             # sinh/cosh moment series truncation (|v t| < 1/2)


# ---------------------------------------------------------------------------
# exponential moments
# ---------------------------------------------------------------------------

def _moment_lower(n: int, gamma: float, t: float) -> float:
    """I_n = int_0^t r^n exp(-gamma r) dr."""
    x = gamma * t
    if x < 0.1:
        acc = 0.0
        term_pref = t ** (n + 1)
        for j in range(8):
            acc += (-x) ** j / (math.factorial(j) * (n + j + 1))
        return term_pref * acc
    p = gammainc(n + 1, x)
    if p <= 0.0:
        return 0.0
    return math.exp(gammaln(n + 1) + math.log(p) - (n + 1) * math.log(gamma))


def _moment_upper(n: int, gamma: float, t: float) -> float:
    """J_n = int_0^t r^n exp(-gamma (t-r)) dr."""
    acc = 0.0
    for j in range(n + 1):
        acc += math.comb(n, j) * (-1) ** j * t ** (n - j) * _moment_lower(j, gamma, t)
    return acc


class _Moments:
    def __init__(self, gamma: float, t: float, n_max: int):
        self.lower = [_moment_lower(n, gamma, t) for n in range(n_max + 1)]
        self.upper = [_moment_upper(n, gamma, t) for n in range(n_max + 1)]


# ---------------------------------------------------------------------------
# basis functions
# ---------------------------------------------------------------------------

def _expm1_div(z: complex) -> complex:
    """(exp(z) - 1)/z with the small-argument series."""
    if abs(z) < 1e-6:
        return 1.0 + z / 2.0 + z * z / 6.0
    return (np.exp(z) - 1.0) / z


def _exp_diff(x: complex, y: complex) -> complex:
    """(exp(x) - exp(y)) / (x - y) for Re x, Re y <= 0, overflow-safe."""
    if (x - y).real > 0:
        x, y = y, x
    return np.exp(y) * _expm1_div(x - y)


class BasisFn:
    """One element of the quartic-ODE solution basis.

    Exposes analytic derivatives up to order 3 and the four exponential
    moments used by the endpoint rows: F0 = int e^{-gr} phi,
    F1 = int e^{-gr} phi', G0 = int e^{-g(t-r)} phi, G1 = int e^{-g(t-r)} phi'.
    """

    def value(self, s, order: int):
        raise NotImplementedError

    def moments(self, gamma: float, mom: _Moments) -> tuple:
        raise NotImplementedError


@dataclass(frozen=True)
class ExpShift(BasisFn):
    """phi(s) = exp(a s + b); b shifts the peak onto [0, t] (|phi| <= 1)."""

    a: complex
    b: complex
    t: float

    def value(self, s, order: int):
        return self.a ** order * np.exp(self.a * np.asarray(s) + self.b)

    def moments(self, gamma: float, mom: _Moments) -> tuple:
        # int e^{c r + b} = (e^{c t + b} - e^b)/c; all exponents have Re <= 0
        a, b, t = self.a, self.b, self.t
        f0 = t * _exp_diff((a - gamma) * t + b, b)
        g0 = t * _exp_diff(a * t + b, b - gamma * t)
        return f0, a * f0, g0, a * g0


@dataclass(frozen=True)
class SExpShift(BasisFn):
    """phi(s) = s exp(a s + b), the confluent partner at root collisions."""

    a: complex
    b: complex
    t: float

    def value(self, s, order: int):
        s = np.asarray(s)
        e = np.exp(self.a * s + self.b)
        a = self.a
        poly = {0: s, 1: 1 + a * s, 2: 2 * a + a * a * s, 3: 3 * a * a + a ** 3 * s}[order]
        return poly * e

    @staticmethod
    def _rexp_int(c: complex, b: complex, t: float) -> complex:
        # int_0^t r e^{c r + b} dr; Re(c t + b) <= 0 and Re(b) <= 0 here
        if abs(c * t) < 1e-5:
            acc = 0.0 + 0.0j
            for k in range(6):
                acc += (c * t) ** k / (math.factorial(k) * (k + 2))
            return np.exp(b) * t * t * acc
        return (t * np.exp(c * t + b)) / c - (t / c) * _exp_diff(c * t + b, b)

    def moments(self, gamma: float, mom: _Moments) -> tuple:
        a, b, t = self.a, self.b, self.t
        f0 = self._rexp_int(a - gamma, b, t)
        f0e = np.exp(b) * t * _expm1_div((a - gamma) * t)
        g0 = self._rexp_int(a + gamma, b - gamma * t, t)
        g0e = np.exp(b - gamma * t) * t * _expm1_div((a + gamma) * t)
        return f0, f0e + a * f0, g0, g0e + a * g0


def _sinhc(z):
    """sinh(z)/z, stable at z -> 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    out = np.where(small, 1.0 + z * z / 6.0 * (1.0 + z * z / 20.0), np.sinh(zs) / zs)
    return out


@dataclass(frozen=True)
class Sinhc(BasisFn):
    """phi(s) = sinh(v s)/v -> s as v -> 0 (kept exact via moment series)."""

    v: complex
    t: float

    def value(self, s, order: int):
        s = np.asarray(s)
        v = self.v
        if order == 0:
            return s * _sinhc(v * s)
        if order == 1:
            return np.cosh(v * s)
        if order == 2:
            return v * v * s * _sinhc(v * s)
        return v * v * np.cosh(v * s)

    def moments(self, gamma: float, mom: _Moments) -> tuple:
        v2 = self.v * self.v
        f0 = f1 = g0 = g1 = 0.0 + 0.0j
        for k in range(_SERIES_TERMS):
            w = v2 ** k
            f0 += w * mom.lower[2 * k + 1] / math.factorial(2 * k + 1)
            f1 += w * mom.lower[2 * k] / math.factorial(2 * k)
            g0 += w * mom.upper[2 * k + 1] / math.factorial(2 * k + 1)
            g1 += w * mom.upper[2 * k] / math.factorial(2 * k)
        return f0, f1, g0, g1


@dataclass(frozen=True)
class CoshFn(BasisFn):
    v: complex
    t: float

    def value(self, s, order: int):
        s = np.asarray(s)
        v = self.v
        if order == 0:
            return np.cosh(v * s)
        if order == 1:
            return v * v * s * _sinhc(v * s)
        if order == 2:
            return v * v * np.cosh(v * s)
        return v ** 4 * s * _sinhc(v * s)

    def moments(self, gamma: float, mom: _Moments) -> tuple:
        v2 = self.v * self.v
        even = odd = 0.0 + 0.0j
        even_u = odd_u = 0.0 + 0.0j
        for k in range(_SERIES_TERMS):
            w = v2 ** k
            even += w * mom.lower[2 * k] / math.factorial(2 * k)
            odd += w * mom.lower[2 * k + 1] / math.factorial(2 * k + 1)
            even_u += w * mom.upper[2 * k] / math.factorial(2 * k)
            odd_u += w * mom.upper[2 * k + 1] / math.factorial(2 * k + 1)
        return even, v2 * odd, even_u, v2 * odd_u


class TaylorFundamental(BasisFn):
    """Power-series solution of u'''' + a u'' + c u = 0 with
    u ~ s^ell / ell! + O(s^4) at s = 0.

    The four of these (ell = 0..3) have an identity Wronskian at the
    origin, so the boundary system stays well conditioned for every root
    configuration, including collisions and complex-conjugate pairs whose
    sinh/cosh columns would be numerically collinear.
    """

    N_TERMS = 32

    def __init__(self, ell: int, a: complex, c: complex, t: float):
        self.ell = ell
        self.t = t
        x = np.zeros(self.N_TERMS, dtype=complex)
        x[ell] = 1.0 / math.factorial(ell)
        for n in range(self.N_TERMS - 4):
            x[n + 4] = -(a * (n + 2) * (n + 1) * x[n + 2] + c * x[n]) / (
                (n + 4) * (n + 3) * (n + 2) * (n + 1))
        self.coef = x

    def value(self, s, order: int):
        s = np.asarray(s, dtype=float)
        acc = np.zeros(s.shape, dtype=complex)
        for m in range(self.N_TERMS - 1 - order, -1, -1):
            c_m = self.coef[m + order] * math.factorial(m + order) / math.factorial(m)
            acc = acc * s + c_m
        return acc

    def moments(self, gamma: float, mom: _Moments) -> tuple:
        f0 = f1 = g0 = g1 = 0.0 + 0.0j
        for n in range(self.N_TERMS):
            x = self.coef[n]
            if x == 0:
                continue
            f0 += x * mom.lower[n]
            g0 += x * mom.upper[n]
            if n:
                f1 += n * x * mom.lower[n - 1]
                g1 += n * x * mom.upper[n - 1]
        return f0, f1, g0, g1


@dataclass(frozen=True)
class Mono(BasisFn):
    """phi(s) = s^n; exact solutions of the lam = 0 quartic."""

    n: int
    t: float

    def value(self, s, order: int):
        s = np.asarray(s, dtype=float)
        n = self.n
        if order > n:
            return np.zeros_like(s) + 0j
        c = math.factorial(n) / math.factorial(n - order)
        return c * s ** (n - order) + 0j

    def moments(self, gamma: float, mom: _Moments) -> tuple:
        n = self.n
        f0, g0 = mom.lower[n], mom.upper[n]
        f1 = n * mom.lower[n - 1] if n else 0.0
        g1 = n * mom.upper[n - 1] if n else 0.0
        return f0, f1, g0, g1


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharacteristicRoots:
    """Roots v1, v2 of the quartic v^4 - (gamma - lam mu)^2 v^2 + c4 = 0,
    c4 = 4 lam^2 mu^2 gamma^2 + 2 i hbar lam gamma^2 / m (free particle)."""

    upsilon1: complex
    upsilon2: complex
    zeta: complex
    degenerate: bool = False


def quartic_coefficients(p: ModelParams) -> tuple[float, complex]:
    """(a, c) of v^4 + a v^2 + c = 0 for the exponential-kernel reduction."""
    a = omega_eff_sq(p) + 2.0 * p.lam * p.mu * p.gamma - p.gamma**2
    c = (4.0 * (p.lam * p.mu * p.gamma) ** 2 - (p.gamma * p.omega) ** 2
         + 2j * p.hbar * p.lam * p.gamma**2 / p.m)
    return a, c


def characteristic_roots(p: ModelParams, horizon: float | None = None) -> CharacteristicRoots:
    """Principal-branch roots; v2^2 is recovered from the product identity
    v1^2 v2^2 = c4 to avoid the cancellation in (gamma - lam mu)^2 - zeta."""
    if p.omega != 0.0:
        raise UnsupportedRegime("closed form covers omega = 0 only; use the grid BVP")
    S = (p.gamma - p.lam * p.mu) ** 2
    _, c4 = quartic_coefficients(p)
    zeta = np.sqrt(complex(S * S - 4.0 * c4))
    v1 = np.sqrt(0.5 * (S + zeta))
    v2 = np.sqrt(c4 / (v1 * v1)) if v1 != 0 else np.sqrt(complex(0.5 * (S - zeta)))
    scale = horizon if horizon is not None else (1.0 / max(p.gamma, 1e-300))
    degenerate = (min(abs(v1), abs(v2)) * scale < DEGENERACY_THRESHOLD
                  or abs(v1 - v2) * scale < DEGENERACY_THRESHOLD)
    return CharacteristicRoots(upsilon1=complex(v1), upsilon2=complex(v2),
                               zeta=complex(zeta), degenerate=bool(degenerate))


def _principal(v: complex) -> complex:
    if v.real > 0 or (v.real == 0 and v.imag >= 0):
        return v
    return -v


def _exp_pair(v: complex, t: float) -> list[BasisFn]:
    return [ExpShift(v, -v * t, t), ExpShift(-v, 0.0, t)]


def build_basis(roots: CharacteristicRoots, t: float,
                quartic: tuple[complex, complex]) -> list[BasisFn]:
    """Four independent quartic-ODE solutions, regime-selected per root.

    Large-argument roots (|v| t >= 1/2) get overflow-safe scaled
    exponential pairs; if both roots are small the Taylor fundamental
    system replaces the hyperbolic pairs entirely (immune to root
    collisions); a lone small root keeps its sinh/cosh pair. Confluent
    s-exponentials cover coalescing large roots.
    """
    a, c = quartic
    v1, v2 = _principal(roots.upsilon1), _principal(roots.upsilon2)
    small1 = abs(v1) * t < SMALL_ARG
    small2 = abs(v2) * t < SMALL_ARG
    if small1 and small2:
        return [TaylorFundamental(ell, a, c, t) for ell in range(4)]
    if small1 or small2:
        v_big, v_small = (v2, v1) if small1 else (v1, v2)
        small_pair = [Mono(1, t), Mono(0, t)] if v_small == 0 \
            else [Sinhc(v_small, t), CoshFn(v_small, t)]
        return _exp_pair(v_big, t) + small_pair
    if abs(v1 - v2) * t < DEGENERACY_THRESHOLD:
        return _exp_pair(v1, t) + [SExpShift(v1, -v1 * t, t), SExpShift(-v1, 0.0, t)]
    return _exp_pair(v1, t) + _exp_pair(v2, t)


# ---------------------------------------------------------------------------
# boundary-value solve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedFormSolution:
    """f or g on [0, t]: coefficients over a quartic-ODE basis."""

    coeffs: np.ndarray
    basis: tuple
    horizon: float
    roots: CharacteristicRoots | None
    role: str

    def __call__(self, s, order: int = 0):
        return self.eval(s, order)

    def eval(self, s, order: int = 0):
        if not 0 <= order <= 3:
            raise Unsupported(f"derivative order {order} not supported (0..3)")
        s = np.asarray(s, dtype=float)
        if np.any(s < -1e-9 * self.horizon) or np.any(s > self.horizon * (1 + 1e-9)):
            raise ValueError("evaluation outside [0, t]")
        acc = 0j
        for c, phi in zip(self.coeffs, self.basis):
            acc = acc + c * phi.value(s, order)
        return acc if acc.ndim else complex(acc)

    @property
    def endpoint_derivatives(self) -> tuple[complex, complex]:
        return complex(self.eval(0.0, 1)), complex(self.eval(self.horizon, 1))


def _reduced_coefficients(p: ModelParams):
    c1 = p.gamma * (1.5 * (p.lam * p.mu) ** 2 + 1j * p.hbar * p.lam / p.m)
    c2 = 0.5 * (p.lam * p.mu) ** 2 * p.gamma
    lmg = p.lam * p.mu * p.gamma
    W2 = omega_eff_sq(p)
    return c1, c2, lmg, W2


def _solve_system(p: ModelParams, t: float, role: str,
                  roots: CharacteristicRoots) -> ClosedFormSolution:
    basis = build_basis(roots, t, quartic_coefficients(p))
    c1, c2, lmg, W2 = _reduced_coefficients(p)
    egt = math.exp(-p.gamma * t)
    mom = _Moments(p.gamma, t, TaylorFundamental.N_TERMS)

    A = np.zeros((4, 4), dtype=complex)
    for j, phi in enumerate(basis):
        v0 = complex(phi.value(0.0, 0))
        vt = complex(phi.value(t, 0))
        dd0 = complex(phi.value(0.0, 2))
        ddt = complex(phi.value(t, 2))
        f0, f1, g0, g1 = phi.moments(p.gamma, mom)
        A[0, j] = v0
        A[1, j] = vt
        A[2, j] = dd0 + W2 * v0 - (c1 - c2) * f0 - lmg * f1 + lmg * (v0 + egt * vt)
        A[3, j] = ddt + W2 * vt - c1 * g0 + c2 * egt * f0 + lmg * g1 + lmg * (egt * v0 + vt)

    if role == "f":
        rhs = np.array([1.0, 0.0, lmg, lmg * egt], dtype=complex)
    else:
        rhs = np.array([0.0, 1.0, 0.0, 0.0], dtype=complex)

    scale = np.max(np.abs(A), axis=1)
    scale[scale == 0] = 1.0
    A_eq = A / scale[:, None]
    cond = np.linalg.cond(A_eq)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditioned(f"boundary system condition {cond:.3e} > {COND_LIMIT:.0e}")
    coeffs = np.linalg.solve(A_eq, rhs / scale)

    sol = ClosedFormSolution(coeffs=coeffs, basis=tuple(basis), horizon=t,
                             roots=roots, role=role)
    b0, bt = (1.0, 0.0) if role == "f" else (0.0, 1.0)
    if abs(sol.eval(0.0) - b0) > 1e-9 or abs(sol.eval(t) - bt) > 1e-9:
        raise NumericsError(f"boundary values of {role} not met to 1e-9")
    return sol


def _linear_solution(t: float, role: str) -> ClosedFormSolution:
    basis = (Mono(1, t), Mono(0, t))
    coeffs = np.array([-1.0 / t, 1.0], dtype=complex) if role == "f" \
        else np.array([1.0 / t, 0.0], dtype=complex)
    return ClosedFormSolution(coeffs=coeffs, basis=basis, horizon=t,
                              roots=None, role=role)


def solve_f(p: ModelParams, t: float,
            roots: CharacteristicRoots | None = None) -> ClosedFormSolution:
    """f: value 1 at s=0, 0 at s=t, solving the reduced equation exactly."""
    if p.omega != 0.0:
        raise UnsupportedRegime("closed form covers omega = 0 only; use the grid BVP")
    if t <= 0:
        raise ValueError("horizon must be positive")
    if p.lam == 0.0:
        return _linear_solution(t, "f")
    if roots is None:
        roots = characteristic_roots(p, horizon=t)
    return _solve_system(p, t, "f", roots)


def solve_g(p: ModelParams, t: float,
            roots: CharacteristicRoots | None = None) -> ClosedFormSolution:
    """g: value 0 at s=0, 1 at s=t; same equation, homogeneous right side."""
    if p.omega != 0.0:
        raise UnsupportedRegime("closed form covers omega = 0 only; use the grid BVP")
    if t <= 0:
        raise ValueError("horizon must be positive")
    if p.lam == 0.0:
        return _linear_solution(t, "g")
    if roots is None:
        roots = characteristic_roots(p, horizon=t)
    return _solve_system(p, t, "g", roots)


def quartic_residual(p: ModelParams, v: complex) -> float:
    """Relative residual of v in the characteristic quartic."""
    a, c = quartic_coefficients(p)
    terms = np.array([v**4, a * v**2, c], dtype=complex)
    num = abs(np.sum(terms))
    den = max(np.max(np.abs(terms)), 1e-300)
    return float(num / den)


def residual_on_grid(p: ModelParams, sol: ClosedFormSolution, n: int = 200,
                     quad_factor: int = 20) -> float:
    """Max relative residual of the reduced equation on n interior nodes.

    Integrals are evaluated by trapezoid quadrature on a quad_factor-times
    finer grid, independently of the moment machinery used by the solver.
    The residual nodes sit on the quadrature grid so the split integrals
    are not truncated mid-interval.
    """
    t = sol.horizon
    c1, c2, lmg, W2 = _reduced_coefficients(p)
    sq = np.linspace(0.0, t, (n + 1) * quad_factor + 1)
    e_q = sol.eval(sq, 0)
    de_q = sol.eval(sq, 1)
    e0, et = sol.eval(0.0), sol.eval(t)
    F0 = np.trapezoid(np.exp(-p.gamma * sq) * e_q, sq)

    s_nodes = sq[quad_factor:-1:quad_factor]
    worst = 0.0
    for s in s_nodes:
        left = sq <= s
        right = sq >= s
        J1 = np.trapezoid(np.exp(-p.gamma * np.abs(s - sq)) * e_q, sq)
        K1 = (np.trapezoid(np.exp(-p.gamma * (s - sq[left])) * de_q[left], sq[left])
              - np.trapezoid(np.exp(-p.gamma * (sq[right] - s)) * de_q[right], sq[right]))
        terms = np.array([
            sol.eval(s, 2),
            W2 * sol.eval(s, 0),
            -c1 * J1,
            c2 * math.exp(-p.gamma * s) * F0,
            lmg * K1,
            lmg * (math.exp(-p.gamma * s) * e0 + math.exp(-p.gamma * (t - s)) * et),
        ], dtype=complex)
        rhs = lmg * math.exp(-p.gamma * s) if sol.role == "f" else 0.0
        scale = max(np.max(np.abs(terms)), abs(rhs), 1e-300)
        worst = max(worst, abs(np.sum(terms) - rhs) / scale)
    return worst
