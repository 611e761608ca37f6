"""Figure-style experiment drivers: spread-vs-time per dissipation strength,
spread-vs-cutoff at fixed time, and the limit-check suite.

The collapse rate lambda is OUR choice: the source figures specify m,
sigma0, mu, t and gamma but never lambda. Defaults below are picked so
the double-precision pipeline resolves the qualitative features:

* spread-vs-time (fig1): lambda = 1e13 m^-2 s^-1 -- collapse transition
  inside the plotted window, monotone mu-ordering, no thermal re-rise.
* spread-vs-cutoff (fig2): lambda = 1e16 m^-2 s^-1 -- the interference
  window gamma in [0.17, 5.8] lambda mu where sigma(gamma) genuinely
  oscillates (the "not strictly decreasing" regime).

Every run writes CSVs with self-describing headers plus a plain-text
run manifest (config hash, seed, versions) for reproducibility.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .closed_form import solve_f, solve_g
from .errors import CollapseDynError
from .gaussian import evolve, free_spread, spread, state_from_sigma
from .grid_bvp import solve_role
from .kernels import Exponential
from .params import ModelParams, params_from_mapping
from .path_integral import compare_to_analytic
from .propagator import deterministic_coeffs, propagator_coeffs

DEFAULT_LAMBDA_FIG1 = 1e13    # m^-2 s^-1
DEFAULT_LAMBDA_FIG2 = 1e16    # m^-2 s^-1
DEFAULT_GAMMA_FIG1 = 1e-4     # s^-1 (fig-2's natural scale; fig-1 leaves it open)
FIG2_FIXED_T = 2e5            # s
FIG2_MU = 5e-19               # m^2
FIG_MASS = 1.0                # kg
FIG_SIGMA0 = 1e-7             # m


def fig1_default_mus() -> list[float]:
    return [10.0 ** e for e in range(-32, -19, 2)] + [5e-19]


def fig2_default_gammas(lam: float = DEFAULT_LAMBDA_FIG2, mu: float = FIG2_MU) -> list[float]:
    """Coarse decade grid for the global trend plus a fine grid resolving
    the oscillation window around gamma ~ lambda mu."""
    coarse = np.geomspace(1e-6, 1e-1, 25)
    lm = lam * mu
    fine = np.geomspace(0.15 * lm, 7.0 * lm, 48)
    return sorted(set(np.round(np.concatenate([coarse, fine]), 12)))


@dataclass(frozen=True)
class SweepConfig:
    """One experiment: base parameters, sweep axis and numerics knobs."""

    base: ModelParams
    axis: str                      # mu | gamma | t | lambda
    axis_values: tuple
    sigma0: float = FIG_SIGMA0
    t_grid: tuple = ()
    solver: str = "closed"         # closed | grid
    grid_n: int = 512
    quad_nodes: int = 512
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.axis not in ("mu", "gamma", "t", "lambda"):
            raise ValueError(f"unknown sweep axis {self.axis!r}")
        vals = tuple(float(v) for v in self.axis_values)
        if any(v < 0 for v in vals) or list(vals) != sorted(vals):
            raise ValueError("axis values must be non-negative and sorted")
        if self.solver not in ("closed", "grid"):
            raise ValueError("solver must be 'closed' or 'grid'")
        if self.solver == "closed" and self.base.omega != 0.0:
            raise ValueError("closed-form solver requires omega = 0")
        if self.sigma0 <= 0:
            raise ValueError("sigma0 must be positive")
        object.__setattr__(self, "axis_values", vals)
        object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))


def default_fig1_config(**over) -> SweepConfig:
    base = ModelParams(m=FIG_MASS, lam=over.pop("lam", DEFAULT_LAMBDA_FIG1),
                       mu=0.0, omega=0.0, gamma=over.pop("gamma", DEFAULT_GAMMA_FIG1))
    kw = dict(base=base, axis="mu", axis_values=tuple(fig1_default_mus()),
              t_grid=tuple(np.geomspace(0.1, 2e5, 64)))
    kw.update(over)
    return SweepConfig(**kw)


def default_fig2_config(**over) -> SweepConfig:
    lam = over.pop("lam", DEFAULT_LAMBDA_FIG2)
    base = ModelParams(m=FIG_MASS, lam=lam, mu=FIG2_MU, omega=0.0, gamma=1e-4)
    kw = dict(base=base, axis="gamma",
              axis_values=tuple(fig2_default_gammas(lam, FIG2_MU)),
              t_grid=(FIG2_FIXED_T,))
    kw.update(over)
    return SweepConfig(**kw)


def sigma_at(p: ModelParams, t: float, sigma0: float, solver: str = "closed",
             grid_n: int = 512, quad_nodes: int = 512) -> float:
    """Deterministic spread at horizon t for a packet of initial spread sigma0."""
    kernel = Exponential(p.gamma)
    if solver == "closed":
        f, g = solve_f(p, t), solve_g(p, t)
    else:
        f = solve_role(p, kernel, t, "f", N=grid_n)
        g = solve_role(p, kernel, t, "g", N=grid_n)
    coeffs = propagator_coeffs(p, kernel, t, f, g, quad_nodes=quad_nodes)
    return spread(evolve(state_from_sigma(sigma0), coeffs))


def _sigma_task(args) -> float:
    p, t, sigma0, solver, grid_n, quad_nodes = args
    return sigma_at(p, t, sigma0, solver, grid_n, quad_nodes)


def _map_points(tasks: list, workers: int) -> list[float]:
    if workers <= 1:
        return [_sigma_task(a) for a in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sigma_task, tasks))


def sigma_curve(cfg: SweepConfig, p: ModelParams, ts) -> np.ndarray:
    tasks = [(p, float(t), cfg.sigma0, cfg.solver, cfg.grid_n, cfg.quad_nodes)
             for t in ts]
    return np.asarray(_map_points(tasks, cfg.workers))


def _write_series(path: Path, header: str, cols: list[np.ndarray]) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in zip(*cols):
            fh.write(",".join(f"{float(v)!r}" for v in row) + "\n")


def _config_text(cfg: SweepConfig, extra: dict) -> str:
    b = cfg.base
    lines = [f"m = {b.m!r}", f"lambda = {b.lam!r}", f"mu = {b.mu!r}",
             f"omega = {b.omega!r}", f"gamma = {b.gamma!r}",
             f"hbar = {b.hbar!r}", f"k_B = {b.k_B!r}",
             f"sigma0 = {cfg.sigma0!r}", f"axis = {cfg.axis!r}",
             f"axis_values = {list(cfg.axis_values)!r}",
             f"t_grid = {list(cfg.t_grid)!r}", f"solver = {cfg.solver!r}",
             f"grid_n = {cfg.grid_n}", f"quad_nodes = {cfg.quad_nodes}",
             f"seed = {cfg.seed}"]
    lines += [f"{k} = {v!r}" for k, v in sorted(extra.items())]
    return "\n".join(lines) + "\n"


def write_manifest(out_dir: Path, cfg: SweepConfig, command: str, **extra) -> None:
    text = _config_text(cfg, extra)
    digest = hashlib.sha256(text.encode()).hexdigest()
    import numpy
    import scipy
    with open(out_dir / "run_manifest.txt", "w") as fh:
        fh.write(f"command = {command}\n")
        fh.write(f"config_sha256 = {digest}\n")
        fh.write(f"seed = {cfg.seed}\n")
        fh.write(f"collapse_dyn_version = {__version__}\n")
        fh.write(f"numpy_version = {numpy.__version__}\n")
        fh.write(f"scipy_version = {scipy.__version__}\n")
        fh.write("\n# config\n")
        fh.write(text)


def run_fig1(cfg: SweepConfig | None = None, out_dir: str | Path = "out/fig1") -> dict:
    """Spread vs time, one series per mu, plus the mu = 0 comparison run.

    Writes fig1_mu_<value>.csv / fig1_mu0.csv with header 't,sigma'.
    """
    if cfg is None:
        cfg = default_fig1_config()
    if cfg.axis != "mu":
        raise ValueError("fig1 sweeps mu")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ts = np.asarray(cfg.t_grid)
    series: dict[float, np.ndarray] = {}
    for mu in cfg.axis_values:
        p = cfg.base.with_(mu=mu)
        series[mu] = sigma_curve(cfg, p, ts)
        _write_series(out / f"fig1_mu_{mu:.6e}.csv", "t,sigma", [ts, series[mu]])
    p0 = cfg.base.with_(mu=0.0)
    series[0.0] = sigma_curve(cfg, p0, ts)
    _write_series(out / "fig1_mu0.csv", "t,sigma", [ts, series[0.0]])
    write_manifest(out, cfg, "fig1")
    if not all(np.all(np.isfinite(s)) for s in series.values()):
        raise CollapseDynError("non-finite spread in fig1 output")
    return {"t": ts, "series": series, "out_dir": out}


def run_fig2(cfg: SweepConfig | None = None, out_dir: str | Path = "out/fig2") -> dict:
    """Spread at fixed t vs gamma, dissipative and mu = 0 series.

    Writes fig2_sigma_vs_gamma.csv / fig2_sigma_vs_gamma_mu0.csv with
    header 'gamma,sigma'.
    """
    if cfg is None:
        cfg = default_fig2_config()
    if cfg.axis != "gamma":
        raise ValueError("fig2 sweeps gamma")
    if len(cfg.t_grid) != 1:
        raise ValueError("fig2 uses a single fixed horizon")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t_fix = cfg.t_grid[0]
    gams = np.asarray(cfg.axis_values)

    sig = np.empty(gams.size)
    sig0 = np.empty(gams.size)
    tasks, tasks0 = [], []
    for gam in gams:
        tasks.append((cfg.base.with_(gamma=gam), t_fix, cfg.sigma0,
                      cfg.solver, cfg.grid_n, cfg.quad_nodes))
        tasks0.append((cfg.base.with_(gamma=gam, mu=0.0), t_fix, cfg.sigma0,
                       cfg.solver, cfg.grid_n, cfg.quad_nodes))
    sig[:] = _map_points(tasks, cfg.workers)
    sig0[:] = _map_points(tasks0, cfg.workers)

    _write_series(out / "fig2_sigma_vs_gamma.csv", "gamma,sigma", [gams, sig])
    _write_series(out / "fig2_sigma_vs_gamma_mu0.csv", "gamma,sigma", [gams, sig0])
    write_manifest(out, cfg, "fig2")
    if not (np.all(np.isfinite(sig)) and np.all(np.isfinite(sig0))):
        raise CollapseDynError("non-finite spread in fig2 output")
    return {"gamma": gams, "sigma": sig, "sigma_mu0": sig0, "out_dir": out}


# ---------------------------------------------------------------------------
# limit suite
# ---------------------------------------------------------------------------

def run_limits(out_dir: str | Path = "out/limits", seed: int = 0) -> list[dict]:
    """Limit checks; failures become report entries, not exceptions.

    (a) mu -> 0 continuity against the mu = 0 code path
    (b) gamma-doubling Cauchy convergence toward the white-noise regime
    (c) lambda -> 0 free-particle spreading
    (d) closed form / grid BVP / path-integral oracle triangle
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries: list[dict] = []

    def add(check, metric, value, threshold, ok):
        entries.append({"check": check, "metric": metric, "value": value,
                        "threshold": threshold, "pass": bool(ok)})

    # (a) mu-continuity at figure scales
    ts = np.geomspace(1.0, 2e5, 16)
    base = ModelParams(m=FIG_MASS, lam=DEFAULT_LAMBDA_FIG1, mu=0.0,
                       omega=0.0, gamma=DEFAULT_GAMMA_FIG1)
    s_mu0 = np.array([sigma_at(base, t, FIG_SIGMA0) for t in ts])
    s_tiny = np.array([sigma_at(base.with_(mu=1e-35), t, FIG_SIGMA0) for t in ts])
    rel = float(np.max(np.abs(s_tiny - s_mu0) / s_mu0))
    add("mu_continuity", "max_rel_sigma_diff", rel, 1e-6, rel < 1e-6)

    # (b) gamma-doubling toward the white-noise regime (scaled units)
    psc = ModelParams(m=1.0, lam=1.0, mu=0.2, omega=0.0, gamma=8.0,
                      hbar=1.0, k_B=1.0)
    t_sc = 1.0
    sigs = []
    for gam in (8.0, 16.0, 32.0, 64.0, 128.0):
        sigs.append(sigma_at(psc.with_(gamma=gam), t_sc, 1.0))
    diffs = [abs(b - a) / a for a, b in zip(sigs, sigs[1:])]
    cauchy = all(d2 < d1 for d1, d2 in zip(diffs, diffs[1:]))
    add("white_noise_cauchy", "last_gamma_doubling_rel_diff", diffs[-1],
        diffs[0], cauchy and diffs[-1] < diffs[0])

    # (c) free-particle spreading
    pfree = base.with_(lam=1e-30, mu=5e-19)
    worst = 0.0
    for t in np.geomspace(10.0, 1e5, 11):
        sig = sigma_at(pfree, t, FIG_SIGMA0)
        ref = free_spread(t, pfree.m, FIG_SIGMA0, pfree.hbar)
        worst = max(worst, abs(sig - ref) / ref)
    add("free_particle", "max_rel_sigma_err", worst, 1e-6, worst < 1e-6)

    # (d) oracle triangle at a generic scaled point
    ptri = ModelParams(m=1.0, lam=1.5, mu=0.3, omega=0.0, gamma=4.0,
                       hbar=1.0, k_B=1.0)
    kern = Exponential(ptri.gamma)
    fc, gc = solve_f(ptri, t_sc), solve_g(ptri, t_sc)
    fgrid = solve_role(ptri, kern, t_sc, "f", N=1024)
    ggrid = solve_role(ptri, kern, t_sc, "g", N=1024)
    df = float(np.max(np.abs(fgrid.values - fc.eval(fgrid.grid))))
    dg = float(np.max(np.abs(ggrid.values - gc.eval(ggrid.grid))))
    add("triangle_closed_grid", "max_abs_f_diff", df, 1e-4, df < 1e-4)
    add("triangle_closed_grid", "max_abs_g_diff", dg, 1e-4, dg < 1e-4)
    rep = compare_to_analytic(ptri, kern, t_sc, (64, 128, 256, 512))
    by_n: dict[int, float] = {}
    for row in rep:
        by_n[row["N"]] = max(by_n.get(row["N"], 0.0),
                             row["abs_err"] / abs(row["target"]))
    ns = sorted(by_n)
    shrinking = all(by_n[a] > by_n[b] for a, b in zip(ns, ns[1:]))
    add("triangle_path_integral", "rel_err_at_N512", by_n[ns[-1]], 1e-2,
        shrinking and by_n[ns[-1]] < 1e-2)

    with open(out / "limits_report.csv", "w") as fh:
        fh.write("check,metric,value,threshold,pass\n")
        for e in entries:
            fh.write(f"{e['check']},{e['metric']},{e['value']!r},"
                     f"{e['threshold']!r},{int(e['pass'])}\n")
    return entries


def run_sweep(cfg: SweepConfig, out_dir: str | Path = "out/sweep") -> dict:
    """Generic one-axis sweep; emits sweep.csv with 'axis_value,t,sigma'."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ts = np.asarray(cfg.t_grid if cfg.t_grid else (FIG2_FIXED_T,))
    rows_axis, rows_t, rows_sig = [], [], []
    for v in cfg.axis_values:
        if cfg.axis == "mu":
            p = cfg.base.with_(mu=v)
        elif cfg.axis == "gamma":
            p = cfg.base.with_(gamma=v)
        elif cfg.axis == "lambda":
            p = cfg.base.with_(lam=v)
        else:
            p = cfg.base
        t_list = (v,) if cfg.axis == "t" else ts
        sig = sigma_curve(cfg, p, t_list)
        for t, s in zip(t_list, sig):
            rows_axis.append(v)
            rows_t.append(t)
            rows_sig.append(s)
    _write_series(out / "sweep.csv", "axis_value,t,sigma",
                  [np.array(rows_axis), np.array(rows_t), np.array(rows_sig)])
    write_manifest(out, cfg, "sweep")
    return {"out_dir": out, "n_rows": len(rows_sig)}


def config_from_file(path: str | Path, command: str, **cli_over) -> SweepConfig:
    """Build a SweepConfig from a flat TOML-like file plus CLI overrides."""
    from .params import parse_flat_config

    data = parse_flat_config(Path(path).read_text())
    base = params_from_mapping(data)
    kw: dict = {}
    if command == "fig1":
        proto = default_fig1_config()
    elif command == "fig2":
        proto = default_fig2_config()
    else:
        proto = None
    kw["axis"] = data.get("axis", proto.axis if proto else "mu")
    if "axis_values" in data:
        kw["axis_values"] = tuple(float(v) for v in data["axis_values"])
    elif proto is not None:
        kw["axis_values"] = proto.axis_values
    else:
        raise ValueError("sweep config needs axis_values")
    if "t_grid" in data:
        kw["t_grid"] = tuple(float(v) for v in data["t_grid"])
    elif {"t_min", "t_max", "t_points"} <= data.keys():
        kw["t_grid"] = tuple(np.geomspace(float(data["t_min"]),
                                          float(data["t_max"]),
                                          int(data["t_points"])))
    elif proto is not None:
        kw["t_grid"] = proto.t_grid
    for key in ("sigma0", "solver", "grid_n", "quad_nodes", "seed", "workers"):
        if key in data:
            kw[key] = data[key]
    kw.update(cli_over)
    return SweepConfig(base=base, **kw)
