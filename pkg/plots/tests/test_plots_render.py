from pathlib import Path

import pytest

from wrplots import ERROR_FLOOR, FigureSpec, render
from wrplots.cli import main

HEADER = "method,theta,T,dx,dt,iteration,error_linf_l2,trace_error_l2,wallclock_ms"


def write_csv(path: Path, rows):
    path.write_text("\n".join([HEADER] + rows) + "\n")
    return path


def sample_csv(path: Path):
    rows = []
    for theta, errs in (("0.4", (1e1, 1e-1, 1e-3)), ("0.5", (1e1, 1e-6, 0.0))):
        for it, err in enumerate(errs, start=1):
            rows.append(f"dnwr,{theta},4,0.02,0.02,{it},{err},{err},1.0")
    return write_csv(path, rows)


class TestRender:
    def test_groups_become_series(self, tmp_path):
        csv = sample_csv(tmp_path / "in.csv")
        out = tmp_path / "fig.png"
        fig = render(FigureSpec(csv_paths=[csv], group_by="theta", out_path=out))
        ax = fig.axes[0]
        assert out.exists() and out.stat().st_size > 0
        assert len(ax.get_lines()) == 2
        assert ax.get_yscale() == "log"
        labels = {t.get_text() for t in ax.get_legend().get_texts()}
        assert labels == {"theta=0.4", "theta=0.5"}

    def test_zero_errors_are_clipped_to_floor(self, tmp_path):
        csv = sample_csv(tmp_path / "in.csv")
        fig = render(FigureSpec(csv_paths=[csv], group_by="theta", out_path=tmp_path / "f.png"))
        ys = [y for line in fig.axes[0].get_lines() for y in line.get_ydata()]
        assert min(ys) == ERROR_FLOOR

    def test_missing_column_is_named(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("method,iteration\ndnwr,1\n")
        with pytest.raises(ValueError, match="error_linf_l2"):
            render(FigureSpec(csv_paths=[path], group_by="method", out_path=tmp_path / "f.png"))

    def test_empty_csv_rejected(self, tmp_path):
        path = write_csv(tmp_path / "empty.csv", [])
        with pytest.raises(ValueError, match="no data rows"):
            render(FigureSpec(csv_paths=[path], group_by="theta", out_path=tmp_path / "f.png"))

    def test_multiple_csv_inputs_merge(self, tmp_path):
        a = write_csv(tmp_path / "a.csv", ["dnwr,0.5,4,0.02,0.02,1,1.0,1.0,1.0"])
        b = write_csv(tmp_path / "b.csv", ["nnwr,0.25,4,0.02,0.02,1,1.0,1.0,1.0"])
        fig = render(FigureSpec(csv_paths=[a, b], group_by="method", out_path=tmp_path / "f.png"))
        assert len(fig.axes[0].get_lines()) == 2

    def test_rerender_is_byte_identical(self, tmp_path):
        csv = sample_csv(tmp_path / "in.csv")
        out1, out2 = tmp_path / "f1.png", tmp_path / "f2.png"
        render(FigureSpec(csv_paths=[csv], group_by="theta", out_path=out1))
        render(FigureSpec(csv_paths=[csv], group_by="theta", out_path=out2))
        assert out1.read_bytes() == out2.read_bytes()


class TestCli:
    def test_plot_subcommand(self, tmp_path):
        csv = sample_csv(tmp_path / "in.csv")
        out = tmp_path / "fig.png"
        code = main(["plot", "--csv", str(csv), "--group-by", "theta", "--out", str(out)])
        assert code == 0 and out.exists()

    def test_missing_column_exit_nonzero(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("method,iteration\ndnwr,1\n")
        code = main(["plot", "--csv", str(path), "--group-by", "method", "--out", str(tmp_path / "f.png")])
        assert code == 1
        assert "error_linf_l2" in capsys.readouterr().err

    def test_missing_file_exit_nonzero(self, tmp_path):
        code = main(["plot", "--csv", str(tmp_path / "nope.csv"), "--group-by", "theta", "--out", str(tmp_path / "f.png")])
        assert code == 1
