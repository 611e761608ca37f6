import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from collapse_dyn import (CharacteristicRoots, ModelParams, characteristic_roots,
                          quartic_residual, residual_on_grid, solve_f, solve_g)
from collapse_dyn.closed_form import quartic_coefficients
from collapse_dyn.errors import Unsupported, UnsupportedRegime

GENERIC_POINTS = [
    dict(lam=1.5, mu=0.3, gamma=4.0),
    dict(lam=0.6, mu=0.2, gamma=2.5),
    dict(lam=2.0, mu=0.5, gamma=6.0),
    dict(lam=1.0, mu=0.05, gamma=8.0),
    dict(lam=0.8, mu=0.45, gamma=3.0),
]


def sp(lam=1.5, mu=0.3, gamma=4.0, omega=0.0):
    return ModelParams(m=1.0, lam=lam, mu=mu, omega=omega, gamma=gamma,
                       hbar=1.0, k_B=1.0)


# ---------------------------------------------------------------- roots

def test_roots_lambda_to_zero_degenerate():
    p = sp(lam=1e-300)
    r = characteristic_roots(p, horizon=1.0)
    assert r.zeta == pytest.approx(p.gamma**2, rel=1e-10)
    assert r.upsilon1 == pytest.approx(p.gamma, rel=1e-10)
    assert abs(r.upsilon2) < 1e-10
    assert r.degenerate


def test_roots_mu_zero_residual():
    p = sp(mu=0.0)
    r = characteristic_roots(p)
    zeta_expect = np.sqrt(complex(p.gamma**4 - 8j * p.hbar * p.lam * p.gamma**2 / p.m))
    assert r.zeta == pytest.approx(zeta_expect, rel=1e-12)
    assert quartic_residual(p, r.upsilon1) < 1e-10
    assert quartic_residual(p, r.upsilon2) < 1e-10


def test_roots_generic_si_residual():
    p = ModelParams(m=1.0, lam=1e-2, mu=1e-19, omega=0.0, gamma=1e-4)
    r = characteristic_roots(p)
    assert quartic_residual(p, r.upsilon1) < 1e-10
    assert quartic_residual(p, r.upsilon2) < 1e-10


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(1e-6, 10.0), mu=st.floats(0.0, 1.0), gamma=st.floats(0.1, 50.0))
def test_roots_quartic_residual_property(lam, mu, gamma):
    p = sp(lam=lam, mu=mu, gamma=gamma)
    r = characteristic_roots(p)
    assert quartic_residual(p, r.upsilon1) < 1e-10
    assert quartic_residual(p, r.upsilon2) < 1e-10


def test_roots_product_identity():
    p = sp()
    r = characteristic_roots(p)
    _, c4 = quartic_coefficients(p)
    assert r.upsilon1**2 * r.upsilon2**2 == pytest.approx(c4, rel=1e-12)


def test_roots_reject_harmonic():
    with pytest.raises(UnsupportedRegime):
        characteristic_roots(sp(omega=1.0))


# ---------------------------------------------------------------- solve

def test_boundary_values_imposed():
    p = sp()
    f, g = solve_f(p, 1.0), solve_g(p, 1.0)
    assert abs(f.eval(0.0) - 1.0) < 1e-9 and abs(f.eval(1.0)) < 1e-9
    assert abs(g.eval(0.0)) < 1e-9 and abs(g.eval(1.0) - 1.0) < 1e-9


def test_free_limit_linear_profiles():
    p = sp(lam=1e-30)
    t = 1.0
    s = np.linspace(0.0, t, 100)
    f, g = solve_f(p, t), solve_g(p, t)
    assert np.max(np.abs(f.eval(s) - (1 - s / t))) < 1e-6
    assert np.max(np.abs(g.eval(s) - s / t)) < 1e-6


def test_lambda_zero_exact_bypass():
    p = sp(lam=0.0)
    f, g = solve_f(p, 2.0), solve_g(p, 2.0)
    s = np.linspace(0.0, 2.0, 7)
    np.testing.assert_allclose(np.asarray(f.eval(s)), 1 - s / 2.0, atol=1e-15)
    np.testing.assert_allclose(np.asarray(g.eval(s)), s / 2.0, atol=1e-15)


@pytest.mark.parametrize("pt", GENERIC_POINTS)
def test_residual_substitution(pt):
    # the acceptance-level residual of the reduced integro-differential
    # equations, via quadrature independent of the solver's moments
    p = sp(**pt)
    t = 1.0
    assert residual_on_grid(p, solve_f(p, t), n=200, quad_factor=40) < 1e-6
    assert residual_on_grid(p, solve_g(p, t), n=200, quad_factor=40) < 1e-6


def test_eval_derivatives_vs_finite_difference():
    p = sp()
    t = 1.0
    f = solve_f(p, t)
    rng = np.random.default_rng(11)
    h = 1e-6 * t
    for s in rng.uniform(2 * h, t - 2 * h, 50):
        fd1 = (f.eval(s + h) - f.eval(s - h)) / (2 * h)
        assert abs(f.eval(s, 1) - fd1) / abs(fd1) < 1e-5
        fd2 = (f.eval(s + h) - 2 * f.eval(s) + f.eval(s - h)) / h**2
        assert abs(f.eval(s, 2) - fd2) / max(abs(fd2), 1e-12) < 1e-3


def test_eval_order_guard():
    f = solve_f(sp(), 1.0)
    with pytest.raises(Unsupported):
        f.eval(0.5, 4)


def test_g_at_t_is_one():
    g = solve_g(sp(), 1.0)
    assert g.eval(1.0, 0) == pytest.approx(1.0, abs=1e-12)


def test_root_branch_independence():
    p = sp()
    t = 1.0
    r = characteristic_roots(p, horizon=t)
    flipped = CharacteristicRoots(upsilon1=-r.upsilon1, upsilon2=-r.upsilon2,
                                  zeta=r.zeta, degenerate=r.degenerate)
    s = np.linspace(0.0, t, 64)
    f1 = solve_f(p, t, roots=r)
    f2 = solve_f(p, t, roots=flipped)
    assert np.max(np.abs(f1.eval(s) - f2.eval(s))) < 1e-9


def test_small_root_taylor_branch_matches_residual():
    # conjugate-root resonance (gamma = lam*mu) exercised at short horizon;
    # the Taylor fundamental basis must keep the equation residual small
    p = ModelParams(m=1.0, lam=1e16, mu=1e-20, omega=0.0, gamma=1e-4)
    t = 0.1
    f = solve_f(p, t)
    assert residual_on_grid(p, f, n=60, quad_factor=40) < 1e-6


def test_reject_harmonic_solver():
    with pytest.raises(UnsupportedRegime):
        solve_f(sp(omega=2.0), 1.0)


def test_closed_form_endpoint_derivative_fields():
    p = sp()
    f = solve_f(p, 1.0)
    d0, dt = f.endpoint_derivatives
    assert d0 == f.eval(0.0, 1)
    assert dt == f.eval(1.0, 1)
