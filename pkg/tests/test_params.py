import math

import pytest
from hypothesis import given, strategies as st

from collapse_dyn import ModelParams, noise_temperature, omega_eff_sq, read_params, write_params
from collapse_dyn.errors import DivergentTemperature

pos = st.floats(min_value=1e-10, max_value=1e10, allow_nan=False, allow_infinity=False)


def test_temperature_frozen_value():
    # hand-computed with 30-digit decimal arithmetic
    p = ModelParams(m=1.0, lam=1e-2, mu=5e-19)
    assert noise_temperature(p) == pytest.approx(4.027532404002326e-28, rel=1e-14)


def test_temperature_pole_at_mu_zero():
    p = ModelParams(m=1.0, lam=1e-2, mu=0.0)
    with pytest.raises(DivergentTemperature):
        noise_temperature(p)


def test_temperature_monotone_and_inverse_in_mu():
    p1 = ModelParams(m=2.0, lam=0.1, mu=1e-6)
    p2 = p1.with_(mu=2e-6)
    assert noise_temperature(p2) == pytest.approx(0.5 * noise_temperature(p1), rel=1e-14)
    assert noise_temperature(p2) < noise_temperature(p1)


@given(m=pos, mu=pos)
def test_temperature_times_mu_constant_in_mu(m, mu):
    p1 = ModelParams(m=m, lam=0.0, mu=mu)
    p2 = p1.with_(mu=10.0 * mu)
    assert noise_temperature(p1) * p1.mu == pytest.approx(
        noise_temperature(p2) * p2.mu, rel=1e-12)


def test_omega_eff_sq_cases():
    p = ModelParams(m=1.0, lam=0.0, mu=0.3, omega=2.0, gamma=1.0, hbar=1.0, k_B=1.0)
    assert omega_eff_sq(p) == 4.0
    p = p.with_(lam=1.5, omega=0.0)
    assert omega_eff_sq(p) == -(1.5 * 0.3) ** 2
    lam, mu = 2.0, 0.25
    p = p.with_(lam=lam, mu=mu, omega=lam * mu)
    assert omega_eff_sq(p) == pytest.approx(0.0, abs=1e-15)


def test_pure_function_bitwise():
    p = ModelParams(m=1.3, lam=0.7, mu=1e-5)
    assert noise_temperature(p) == noise_temperature(p)
    assert omega_eff_sq(p) == omega_eff_sq(p)


@pytest.mark.parametrize("field,value", [
    ("m", 0.0), ("m", -1.0), ("lam", -0.1), ("mu", -1e-30),
    ("gamma", 0.0), ("hbar", 0.0), ("k_B", -1.0), ("omega", -2.0),
    ("m", math.nan), ("gamma", math.inf),
])
def test_invalid_params_rejected(field, value):
    kw = dict(m=1.0, lam=0.1, mu=1e-6, omega=0.0, gamma=1.0)
    kw[field] = value
    with pytest.raises(ValueError):
        ModelParams(**kw)


def test_param_file_roundtrip(tmp_path):
    p = ModelParams(m=2.5, lam=3e-2, mu=4e-19, omega=0.5, gamma=2e-4)
    path = tmp_path / "params.toml"
    write_params(p, path)
    q = read_params(path)
    assert q == p
