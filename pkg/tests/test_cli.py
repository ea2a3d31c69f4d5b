import csv
import json
import subprocess
import sys

import pytest

from waverelax.cli import ConfigError, load_config, main


def write_config(tmp_path, body, name="exp.ini"):
    path = tmp_path / name
    path.write_text(body)
    return path


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


BASE = """
[run]
methods = dnwr
thetas = 0.5
windows = 4
max_iterations = 8

[output]
dir = {out}
"""


class TestConfigParsing:
    def test_defaults_fill_in(self, tmp_path):
        cfg = load_config(write_config(tmp_path, BASE.format(out=tmp_path / "o")))
        assert cfg.dx == 0.02 and cfg.dt == 0.02
        assert cfg.problem.a == 3.0 and cfg.problem.b == 2.0
        assert cfg.tolerance == 1e-10

    def test_unknown_key_rejected_with_line(self, tmp_path):
        path = write_config(tmp_path, "[run]\nmthods = dnwr\n")
        with pytest.raises(ConfigError) as err:
            load_config(path)
        assert "mthods" in str(err.value)
        assert ":2" in str(err.value)

    def test_unknown_method_rejected(self, tmp_path):
        path = write_config(tmp_path, "[run]\nmethods = dnwr bogus\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_empty_methods_rejected(self, tmp_path):
        path = write_config(tmp_path, "[run]\nmethods =\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_function_whitelist(self, tmp_path):
        path = write_config(
            tmp_path,
            "[problem]\nv0 = poly:0,1\nu0 = xexp:2,-0.5\n[run]\nmethods = dnwr\n",
        )
        cfg = load_config(path)
        assert cfg.problem.v0(1.0) == pytest.approx(1.0)
        path2 = write_config(tmp_path, "[problem]\nv0 = exec:evil\n", name="b.ini")
        with pytest.raises(ConfigError):
            load_config(path2)


class TestRunCommand:
    def test_run_writes_csv_summary_and_effective_config(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(tmp_path, BASE.format(out=out))
        assert main(["run", str(path)]) == 0
        rows = read_rows(out / "convergence.csv")
        assert rows[0]["method"] == "dnwr"
        assert float(rows[-1]["error_linf_l2"]) <= 1e-10
        summary = json.loads((out / "summary.json").read_text())
        combo = summary["combinations"][0]
        assert combo["iterations_to_tolerance"] <= combo["theory"]["finite_step_bound"]
        effective = (out / "effective_config.ini").read_text()
        assert "tolerance" in effective and "v0" in effective

    def test_rows_are_deterministic_modulo_wallclock(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        p1 = write_config(tmp_path, BASE.format(out=out1), name="a.ini")
        p2 = write_config(tmp_path, BASE.format(out=out2), name="b.ini")
        assert main(["run", str(p1)]) == 0
        assert main(["run", str(p2)]) == 0

        def strip(path):
            lines = (path / "convergence.csv").read_text().splitlines()
            return [",".join(l.split(",")[:-1]) for l in lines]

        assert strip(out1) == strip(out2)

    def test_swr_rows_have_zero_theta(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path,
            "[run]\nmethods = swr_optimized\nwindows = 2\nmax_iterations = 6\n"
            f"tolerance = 1e-8\n[output]\ndir = {out}\n",
        )
        assert main(["run", str(path)]) == 0
        rows = read_rows(out / "convergence.csv")
        assert all(r["theta"] == "0.0" for r in rows)

    def test_output_dir_env_override(self, tmp_path, monkeypatch):
        override = tmp_path / "elsewhere"
        monkeypatch.setenv("WAVERELAX_OUTPUT_DIR", str(override))
        path = write_config(tmp_path, BASE.format(out=tmp_path / "ignored"))
        assert main(["run", str(path)]) == 0
        assert (override / "convergence.csv").exists()

    def test_numerical_failure_reports_exit_3(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path,
            "[discretization]\ndx = 0.02\ndt = 0.04\n"
            f"[run]\nmethods = dnwr\nthetas = 0.5\nwindows = 4\n[output]\ndir = {out}\n",
        )
        assert main(["run", str(path)]) == 3
        summary = json.loads((out / "summary.json").read_text())
        assert summary["combinations"][0]["status"] == "failed"

    def test_config_error_exit_2(self, tmp_path, capsys):
        path = write_config(tmp_path, "[run]\nmethods = dnwr\nthetas = oops\n")
        assert main(["run", str(path)]) == 2
        assert "thetas" in capsys.readouterr().err

    def test_theta_sweep_shows_convergence_and_divergence(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path,
            "[run]\nmethods = dnwr\nthetas = 0.5 0.9\nwindows = 16\n"
            f"max_iterations = 10\ntolerance = 0\n[output]\ndir = {out}\n",
        )
        assert main(["run", str(path)]) == 0
        rows = read_rows(out / "convergence.csv")
        by_theta = {}
        for r in rows:
            by_theta.setdefault(r["theta"], []).append(float(r["error_linf_l2"]))
        assert min(by_theta["0.5"][:5]) <= 1e-10
        assert by_theta["0.9"][-1] > by_theta["0.9"][0]

    def test_nnwr_window_sweep_counts(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path,
            "[run]\nmethods = nnwr\nthetas = 0.25\nwindows = 4 8 12 16\n"
            f"max_iterations = 8\n[output]\ndir = {out}\n",
        )
        assert main(["run", str(path)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        counts = {c["T"]: c["iterations_to_tolerance"] for c in summary["combinations"]}
        assert counts[4.0] <= 2
        assert (counts[8.0], counts[12.0], counts[16.0]) == (2, 3, 3)

    def test_divergent_theta_is_not_an_error(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path,
            "[run]\nmethods = dnwr\nthetas = 0.9\nwindows = 4\nmax_iterations = 6\n"
            f"[output]\ndir = {out}\n",
        )
        assert main(["run", str(path)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["combinations"][0]["converged"] is False


class TestCompareCommand:
    def test_compare_needs_two_methods(self, tmp_path):
        path = write_config(tmp_path, BASE.format(out=tmp_path / "o"))
        assert main(["compare", str(path)]) == 2

    def test_compare_writes_one_csv_per_method_series(self, tmp_path):
        out = tmp_path / "out"
        path = write_config(
            tmp_path,
            "[run]\nmethods = dnwr nnwr swr_optimized\nwindows = 2\n"
            f"max_iterations = 10\ntolerance = 1e-8\n[output]\ndir = {out}\n",
        )
        assert main(["compare", str(path)]) == 0
        rows = read_rows(out / "comparison.csv")
        assert {r["method"] for r in rows} == {"dnwr", "nnwr", "swr_optimized"}
        dnwr_thetas = {r["theta"] for r in rows if r["method"] == "dnwr"}
        nnwr_thetas = {r["theta"] for r in rows if r["method"] == "nnwr"}
        assert dnwr_thetas == {"0.5"} and nnwr_thetas == {"0.25"}


class TestTheoryCommand:
    def test_report(self, capsys):
        assert main(["theory", "dnwr", "3", "2", "1", "16", "0.5"]) == 0
        out = capsys.readouterr().out
        assert "finite_step_bound: 5" in out
        assert "symmetric_rate: 0" in out
        assert "min_delay: 4" in out

    def test_rejects_swr(self, capsys):
        assert main(["theory", "swr_classical", "3", "2", "1", "16", "0.5"]) == 2


class TestVersionAndEntryPoint:
    def test_version(self, capsys):
        assert main(["version"]) == 0
        assert capsys.readouterr().out.strip() == "0.1.0"

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "waverelax", "version"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "0.1.0"

    def test_bad_usage_exit_2(self):
        proc = subprocess.run(
            [sys.executable, "-m", "waverelax", "frobnicate"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 2
