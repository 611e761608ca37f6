import numpy as np
import pytest

from collapse_dyn import Exponential, ModelParams, sample_noise, solve_f, solve_g, zero_noise
from collapse_dyn.errors import ContractViolation
from collapse_dyn.grid_bvp import make_grid, solve_role
from collapse_dyn.kernels import NoisePath, drive_A_path
from collapse_dyn.propagator import (CSV_HEADER, deterministic_coeffs, dump_coeffs,
                                     propagator_coeffs, stochastic_coeffs)

K = Exponential(4.0)


def sp(lam=1.5, mu=0.3, gamma=4.0):
    return ModelParams(m=1.0, lam=lam, mu=mu, omega=0.0, gamma=gamma,
                       hbar=1.0, k_B=1.0)


def test_free_limit_values():
    p = sp(lam=1e-30)
    t = 2.0
    A, At, B = deterministic_coeffs(p, K, t, solve_f(p, t), solve_g(p, t))
    free = -1j * p.m / (2 * p.hbar * t)
    assert A == pytest.approx(free, rel=1e-9)
    assert At == pytest.approx(free, rel=1e-9)
    assert B == pytest.approx(2 * free, rel=1e-9)


def test_atilde_direct_identity():
    p = sp()
    t = 1.0
    g = solve_g(p, t)
    _, At, _ = deterministic_coeffs(p, K, t, solve_f(p, t), g)
    k = 1j * p.m / (2 * p.hbar)
    assert At == pytest.approx(-k * (g.eval(t, 1) - p.lam * p.mu), rel=1e-12)


def test_deterministic_never_reads_noise():
    p = sp()
    t = 1.0
    f, g = solve_f(p, t), solve_g(p, t)
    base = deterministic_coeffs(p, K, t, f, g)
    for seed in range(10):
        again = deterministic_coeffs(p, K, t, f, g)
        assert again == base  # bitwise


def test_scaling_one_over_t_in_free_limit():
    p = sp(lam=1e-30)
    ratios = []
    for t in (0.5, 1.0, 2.0, 4.0, 8.0):
        A, At, B = deterministic_coeffs(p, K, t, solve_f(p, t), solve_g(p, t))
        ratios.append((A * t, At * t, B * t))
    for a, at, b in ratios[1:]:
        assert a == pytest.approx(ratios[0][0], rel=1e-9)
        assert at == pytest.approx(ratios[0][1], rel=1e-9)
        assert b == pytest.approx(ratios[0][2], rel=1e-9)


def test_stochastic_zero_noise():
    p = sp()
    t = 1.0
    N = 64
    grid = make_grid(t, N)
    w = zero_noise(grid)
    h = solve_role(p, K, t, "h", N=N, noise=w)
    C, D, E = stochastic_coeffs(p, K, t, solve_f(p, t), solve_g(p, t), h, w)
    assert C == 0 and D == 0 and E == 0


def test_stochastic_mu_zero_reduction():
    # all mu-carrying terms vanish: C = -k (h'(0) + int (A/m) f ds)
    p = sp(mu=0.0)
    t = 1.0
    N = 256
    grid = make_grid(t, N)
    w = sample_noise(K, grid, seed=12)
    f, g = solve_f(p, t), solve_g(p, t)
    h = solve_role(p, K, t, "h", N=N, noise=w)
    C, D, E = stochastic_coeffs(p, K, t, f, g, h, w)
    k = 1j * p.m / (2 * p.hbar)
    a_over_m = drive_A_path(p, K, w) / p.m
    np.testing.assert_allclose(a_over_m, 1j * p.hbar * np.sqrt(p.lam) * w.values / p.m,
                               rtol=1e-14)
    C_expect = -k * (h.deriv0 + np.trapezoid(a_over_m * np.asarray(f.eval(grid)), grid))
    assert C == pytest.approx(C_expect, rel=1e-12)
    D_expect = k * (h.deriv_t - np.trapezoid(a_over_m * np.asarray(g.eval(grid)), grid))
    assert D == pytest.approx(D_expect, rel=1e-12)


def test_linear_scaling_C_D_quadratic_E():
    p = sp()
    t = 1.0
    N = 128
    grid = make_grid(t, N)
    w = sample_noise(K, grid, seed=30)
    w2 = NoisePath(grid=grid, values=2.0 * w.values, seed=None)
    f, g = solve_f(p, t), solve_g(p, t)
    h = solve_role(p, K, t, "h", N=N, noise=w)
    h2 = solve_role(p, K, t, "h", N=N, noise=w2)
    C1, D1, E1 = stochastic_coeffs(p, K, t, f, g, h, w)
    C2, D2, E2 = stochastic_coeffs(p, K, t, f, g, h2, w2)
    assert C2 == pytest.approx(2 * C1, rel=1e-9)
    assert D2 == pytest.approx(2 * D1, rel=1e-9)
    # E is quadratic in the path: doubling w quadruples it, and the
    # deviation from linear scaling equals the recomputed quadratic part
    assert abs(E2 - 2 * E1) > 0
    assert E2 - 2 * E1 == pytest.approx(2 * E1, rel=1e-6)
    assert E2 == pytest.approx(4 * E1, rel=1e-6)


def test_horizon_mismatch_raises():
    p = sp()
    f = solve_f(p, 1.0)
    g = solve_g(p, 2.0)
    with pytest.raises(ContractViolation):
        deterministic_coeffs(p, K, 2.0, f, g)


def test_grid_noise_mismatch_raises():
    p = sp()
    t = 1.0
    N = 64
    h = solve_role(p, K, t, "h", N=N, noise=zero_noise(make_grid(t, N)))
    w_bad = zero_noise(make_grid(t, 32))
    with pytest.raises(ContractViolation):
        stochastic_coeffs(p, K, t, solve_f(p, t), solve_g(p, t), h, w_bad)


def test_coefficient_dump(tmp_path):
    p = sp()
    rows = []
    for t in (0.5, 1.0):
        rows.append(propagator_coeffs(p, K, t, solve_f(p, t), solve_g(p, t)))
    path = tmp_path / "coeffs.csv"
    dump_coeffs(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    assert all(np.isfinite(float(v)) for v in lines[1].split(","))


def test_deterministic_coeffs_from_grid_solutions():
    p = sp()
    t = 1.0
    fg = solve_role(p, K, t, "f", N=1024)
    gg = solve_role(p, K, t, "g", N=1024)
    got = deterministic_coeffs(p, K, t, fg, gg)
    want = deterministic_coeffs(p, K, t, solve_f(p, t), solve_g(p, t))
    for a, b in zip(got, want):
        assert a == pytest.approx(b, rel=2e-5)
