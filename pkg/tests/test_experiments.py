import hashlib
from pathlib import Path

import numpy as np
import pytest

from collapse_dyn import ModelParams
from collapse_dyn.cli import main as cli_main
from collapse_dyn.experiments import (SweepConfig, config_from_file,
                                      default_fig1_config, default_fig2_config,
                                      fig2_default_gammas, run_fig1, run_fig2,
                                      run_limits, run_sweep, sigma_at)


def small_fig1_cfg(**over):
    kw = dict(axis_values=(1e-32, 1e-21, 5e-19),
              t_grid=tuple(np.geomspace(1.0, 2e5, 10)))
    kw.update(over)
    return default_fig1_config(**kw)


def test_config_validation():
    base = ModelParams(m=1.0, lam=1e13, mu=0.0, omega=0.0, gamma=1e-4)
    with pytest.raises(ValueError):
        SweepConfig(base=base, axis="nope", axis_values=(1.0,))
    with pytest.raises(ValueError):
        SweepConfig(base=base, axis="mu", axis_values=(2.0, 1.0))
    with pytest.raises(ValueError):
        SweepConfig(base=base.with_(omega=1.0), axis="mu", axis_values=(1.0,),
                    solver="closed")


def test_fig1_outputs_and_reproducibility(tmp_path):
    cfg = small_fig1_cfg()
    res1 = run_fig1(cfg, tmp_path / "a")
    res2 = run_fig1(cfg, tmp_path / "b")
    files = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
    assert "fig1_mu0.csv" in files and len(files) == 4
    for name in files:
        b1 = (tmp_path / "a" / name).read_bytes()
        b2 = (tmp_path / "b" / name).read_bytes()
        assert hashlib.sha256(b1).hexdigest() == hashlib.sha256(b2).hexdigest()
    assert (tmp_path / "a" / "run_manifest.txt").exists()


def test_fig1_qualitative_claims(tmp_path):
    res = run_fig1(small_fig1_cfg(), tmp_path)
    series = res["series"]
    mus = sorted(m for m in series if m > 0)
    # mu -> 0 coincidence
    rel = np.max(np.abs(series[mus[0]] - series[0.0]) / series[0.0])
    assert rel < 1e-3
    # ordering and shrinkage
    for m1, m2 in zip(mus, mus[1:]):
        assert np.all(series[m1] <= series[m2] * (1 + 1e-9))
    for m in mus:
        s = series[m]
        i0 = int(np.argmax(s))
        assert i0 <= 2
        assert np.all(np.diff(s[i0:]) <= 1e-9 * s[i0:][:-1])


def test_fig2_qualitative_claims(tmp_path):
    cfg = default_fig2_config()
    res = run_fig2(cfg, tmp_path)
    sig = res["sigma"]
    assert sig[0] > sig[-1]                    # overall decreasing trend
    assert np.any(np.diff(sig) > 0)            # but not strictly decreasing
    # dissipative spread exceeds the non-dissipative one
    assert np.all(res["sigma_mu0"] <= sig * (1 + 1e-9))
    # discretization independence: doubled quadrature moves sigma < 1e-3
    cfg2 = default_fig2_config(quad_nodes=1024)
    res2 = run_fig2(cfg2, tmp_path / "dense")
    assert np.max(np.abs(res2["sigma"] - sig) / sig) < 1e-3
    assert np.any(np.diff(res2["sigma"]) > 0)  # feature stable under refinement


def test_sweep_axis_values_sorted_positive():
    gams = fig2_default_gammas()
    assert all(a < b for a, b in zip(gams, gams[1:]))
    assert gams[0] > 0


def test_run_limits_all_pass(tmp_path):
    entries = run_limits(tmp_path)
    assert entries and all(e["pass"] for e in entries)
    report = (tmp_path / "limits_report.csv").read_text().splitlines()
    assert report[0] == "check,metric,value,threshold,pass"
    assert len(report) == 1 + len(entries)


def test_run_sweep_generic(tmp_path):
    base = ModelParams(m=1.0, lam=1.0, mu=0.2, omega=0.0, gamma=4.0,
                       hbar=1.0, k_B=1.0)
    cfg = SweepConfig(base=base, axis="gamma", axis_values=(2.0, 4.0, 8.0),
                      sigma0=1.0, t_grid=(0.5, 1.0))
    res = run_sweep(cfg, tmp_path)
    lines = (Path(res["out_dir"]) / "sweep.csv").read_text().splitlines()
    assert lines[0] == "axis_value,t,sigma"
    assert len(lines) == 1 + 6


def test_config_file_parsing(tmp_path):
    cfg_file = tmp_path / "run.toml"
    cfg_file.write_text(
        "m = 1.0\nlambda = 1e13\nmu = 0.0\nomega = 0.0\ngamma = 1e-4\n"
        "sigma0 = 1e-7\naxis = \"mu\"\naxis_values = [1e-32, 5e-19]\n"
        "t_min = 1.0\nt_max = 1e4\nt_points = 5\nsolver = \"closed\"\n")
    cfg = config_from_file(cfg_file, "fig1")
    assert cfg.base.lam == 1e13
    assert cfg.axis_values == (1e-32, 5e-19)
    assert len(cfg.t_grid) == 5
    assert cfg.sigma0 == 1e-7


def test_cli_fig1_and_exit_codes(tmp_path):
    cfg_file = tmp_path / "run.toml"
    cfg_file.write_text(
        "m = 1.0\nlambda = 1e13\nmu = 0.0\nomega = 0.0\ngamma = 1e-4\n"
        "sigma0 = 1e-7\naxis_values = [1e-32, 5e-19]\n"
        "t_min = 1.0\nt_max = 1e4\nt_points = 4\n")
    rc = cli_main(["fig1", "--config", str(cfg_file), "--out", str(tmp_path / "o")])
    assert rc == 0
    assert (tmp_path / "o" / "fig1_mu0.csv").exists()
    rc = cli_main(["sweep"])  # missing --config
    assert rc != 0


def test_cli_worker_pool_matches_serial(tmp_path):
    cfg1 = small_fig1_cfg(t_grid=tuple(np.geomspace(1.0, 1e4, 6)))
    cfg2 = small_fig1_cfg(t_grid=tuple(np.geomspace(1.0, 1e4, 6)), workers=2)
    r1 = run_fig1(cfg1, tmp_path / "serial")
    r2 = run_fig1(cfg2, tmp_path / "pool")
    for mu in r1["series"]:
        np.testing.assert_array_equal(r1["series"][mu], r2["series"][mu])


def test_solver_grid_route(tmp_path):
    base = ModelParams(m=1.0, lam=1.0, mu=0.2, omega=0.0, gamma=4.0,
                       hbar=1.0, k_B=1.0)
    s_closed = sigma_at(base, 1.0, 1.0, solver="closed")
    s_grid = sigma_at(base, 1.0, 1.0, solver="grid", grid_n=512)
    assert abs(s_closed - s_grid) / s_closed < 1e-4
