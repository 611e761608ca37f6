import hashlib
import sys
from pathlib import Path

import pytest

PLOTS_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PLOTS_DIR))

from plot_fig1 import main as fig1_main, render_fig1  # noqa: E402
from plot_fig2 import main as fig2_main, render_fig2  # noqa: E402
from series_io import SeriesFileError, discover_fig1, load_series  # noqa: E402

SAMPLE_FIG1 = PLOTS_DIR / "sample_data" / "fig1"
SAMPLE_FIG2 = PLOTS_DIR / "sample_data" / "fig2"


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_fig1_deterministic_pixels(tmp_path):
    p1 = render_fig1(SAMPLE_FIG1, tmp_path / "a.png")
    p2 = render_fig1(SAMPLE_FIG1, tmp_path / "b.png")
    assert sha256(p1) == sha256(p2)
    assert p1.stat().st_size > 10_000


def test_fig2_deterministic_pixels(tmp_path):
    p1 = render_fig2(SAMPLE_FIG2, tmp_path / "a.png")
    p2 = render_fig2(SAMPLE_FIG2, tmp_path / "b.png")
    assert sha256(p1) == sha256(p2)


def test_fig1_single_series_one_curve(tmp_path):
    src = SAMPLE_FIG1 / "fig1_mu_1.000000e-21.csv"
    (tmp_path / "only").mkdir()
    (tmp_path / "only" / src.name).write_bytes(src.read_bytes())
    import matplotlib.pyplot as plt
    out = render_fig1(tmp_path / "only", tmp_path / "one.png")
    assert out.exists()
    # re-render through the axes to count curves
    series, mu0 = discover_fig1(tmp_path / "only")
    assert len(series) == 1 and mu0 is None


def test_fig1_legend_sorted_by_mu():
    series, _ = discover_fig1(SAMPLE_FIG1)
    mus = [mu for mu, _ in series]
    assert mus == sorted(mus)


def test_missing_and_malformed_inputs(tmp_path):
    with pytest.raises(SeriesFileError, match="no fig1_mu"):
        discover_fig1(tmp_path)
    bad = tmp_path / "fig1_mu_1.000000e-21.csv"
    bad.write_text("wrong,header\n1,2\n")
    with pytest.raises(SeriesFileError, match="expected header"):
        discover_fig1(tmp_path)
    bad.write_text("t,sigma\n1.0,nan\n")
    with pytest.raises(SeriesFileError, match="non-finite"):
        discover_fig1(tmp_path)


def test_cli_entry_points(tmp_path):
    rc = fig1_main(["--in", str(SAMPLE_FIG1), "--out", str(tmp_path / "f1.png")])
    assert rc == 0 and (tmp_path / "f1.png").exists()
    rc = fig2_main(["--in", str(SAMPLE_FIG2), "--out", str(tmp_path / "f2"),
                    "--format", "png"])
    assert rc == 0 and (tmp_path / "f2.png").exists()
    rc = fig1_main(["--in", str(tmp_path / "nope"), "--out", str(tmp_path / "x.png")])
    assert rc == 1


def test_series_loader_contract():
    sf = load_series(SAMPLE_FIG2 / "fig2_sigma_vs_gamma.csv", "gamma,sigma")
    assert sf.columns == ("gamma", "sigma")
    assert sf.col("gamma").size == sf.col("sigma").size > 10
