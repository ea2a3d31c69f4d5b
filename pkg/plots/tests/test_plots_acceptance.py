"""Acceptance check for the plotting package.

Drives the solver CLI end to end to produce the weight-sweep, window-sweep,
and method-comparison CSVs, renders the three figures, and verifies series
counts and axis scales programmatically.
"""

import subprocess
import sys

import pytest

from wrplots import FigureSpec, render


def run_solver(subcommand, config_path):
    proc = subprocess.run(
        [sys.executable, "-m", "waverelax", subcommand, str(config_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def experiment_csvs(tmp_path_factory):
    base = tmp_path_factory.mktemp("figdata")

    theta_dir = base / "theta"
    cfg = base / "theta.ini"
    cfg.write_text(
        "[run]\nmethods = dnwr\nthetas = 0.2 0.4 0.5 0.6 0.9\nwindows = 16\n"
        f"max_iterations = 10\ntolerance = 1e-10\n[output]\ndir = {theta_dir}\n"
    )
    run_solver("run", cfg)

    window_dir = base / "window"
    cfg = base / "window.ini"
    cfg.write_text(
        "[run]\nmethods = dnwr\nthetas = 0.5\nwindows = 4 8 12 16\n"
        f"max_iterations = 10\ntolerance = 1e-10\n[output]\ndir = {window_dir}\n"
    )
    run_solver("run", cfg)

    compare_dir = base / "compare"
    cfg = base / "compare.ini"
    cfg.write_text(
        "[run]\nmethods = dnwr nnwr swr_classical swr_optimized\nwindows = 4\n"
        f"max_iterations = 40\ntolerance = 1e-8\noverlap_cells = 24\n[output]\ndir = {compare_dir}\n"
    )
    run_solver("compare", cfg)

    return {
        "theta": theta_dir / "convergence.csv",
        "window": window_dir / "convergence.csv",
        "compare": compare_dir / "comparison.csv",
    }


def test_criterion_12_three_figures(experiment_csvs, tmp_path):
    cases = (
        ("theta", "theta", 5),
        ("window", "T", 4),
        ("compare", "method", 4),
    )
    counts = {}
    for name, key, expected in cases:
        out = tmp_path / f"{name}.png"
        fig = render(FigureSpec(csv_paths=[experiment_csvs[name]], group_by=key, out_path=out))
        ax = fig.axes[0]
        assert out.exists() and out.stat().st_size > 0
        assert ax.get_yscale() == "log"
        assert len(ax.get_lines()) == expected, name
        counts[name] = len(ax.get_lines())
    print(
        f"criterion 12: PASS - weight-sweep/window-sweep/comparison figures render "
        f"with {counts['theta']}/{counts['window']}/{counts['compare']} series on log axes"
    )


def test_optimal_weight_series_hits_the_floor(experiment_csvs, tmp_path):
    # the weight-1/2 series terminates at the clipping floor by sweep 5
    fig = render(
        FigureSpec(
            csv_paths=[experiment_csvs["theta"]], group_by="theta",
            out_path=tmp_path / "t.png",
        )
    )
    (best,) = [
        line for line in fig.axes[0].get_lines()
        if line.get_label() == "theta=0.5"
    ]
    xs, ys = best.get_xdata(), best.get_ydata()
    at5 = [y for x, y in zip(xs, ys) if x == 5]
    assert at5 and at5[0] <= 1e-10
