import csv
import subprocess
import sys

import pytest

from midas_specd.cli import main


@pytest.fixture
def null_files(tmp_path):
    low, high = tmp_path / "low.csv", tmp_path / "high.csv"
    assert main(["simulate", "--T", "125", "--m", "12", "--seed", "5", "--theta", "0",
                 "--low", str(low), "--high", str(high)]) == 0
    return low, high


def test_test_command_reports_all_methods(null_files, tmp_path, capsys):
    low, high = null_files
    out = tmp_path / "res.csv"
    code = main(["test", "--low", str(low), "--high", str(high), "--method", "all",
                 "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["method"] for r in rows] == ["new", "agk", "miller", "lambda"]
    for r in rows:
        assert 0.0 <= float(r["p_value"]) <= 1.0
    printed = capsys.readouterr().out
    assert "bandwidth=4" in printed and "np.float64" not in printed
    assert "np.float64" not in out.read_text()


def test_rejection_is_not_an_error(tmp_path):
    low, high = tmp_path / "l.csv", tmp_path / "h.csv"
    main(["simulate", "--T", "200", "--m", "150", "--theta", "1.0", "--seed", "1",
          "--low", str(low), "--high", str(high)])
    out = tmp_path / "r.csv"
    assert main(["test", "--low", str(low), "--high", str(high), "--method", "new",
                 "--out", str(out)]) == 0
    assert list(csv.DictReader(out.open()))[0]["reject"] == "true"


def test_argument_errors_exit_2(null_files, capsys):
    low, high = null_files
    assert main(["test", "--low", str(low)]) == 2
    assert main(["test", "--low", str(low), "--high", str(high), "--null", "beta"]) == 2
    assert main(["test", "--low", str(low), "--high", str(high), "--method", "wald"]) == 2
    assert main(["mc", "--c", "1.5", "--reps", "2"]) == 2
    assert main(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_data_errors_exit_1(null_files, tmp_path):
    low, high = null_files
    assert main(["test", "--low", str(low), "--high", str(high), "--m", "5"]) == 1
    assert main(["test", "--low", str(tmp_path / "missing.csv"), "--high", str(high)]) == 1


def test_mc_is_deterministic(tmp_path, monkeypatch):
    args = ["mc", "--T", "60", "--m", "12", "--c", "0", "--k", "0,0.5", "--reps", "20",
            "--methods", "new,agk"]
    monkeypatch.setenv("MIDAS_SPECD_SEED", "42")
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(args + ["--out", str(c), "--seed", "43"]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_mc_markdown(tmp_path):
    out = tmp_path / "t.md"
    assert main(["mc", "--preset", "desk", "--T", "60", "--m", "8", "--c", "0", "--k", "0",
                 "--reps", "3", "--format", "md", "--out", str(out)]) == 0
    assert out.read_text().startswith("| T | m | d | c | method | 0.0 | failures |")


def test_oracle_null_collapse(capsys):
    assert main(["oracle", "--theta", "0", "--m-list", "8,16,32"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert len(rows) == 6
    assert all(float(r["analytic"]) == 0.0 for r in rows)


def test_oracle_with_monte_carlo(capsys):
    assert main(["oracle", "--theta", "1", "--m-list", "16", "--reps", "50", "--T", "50"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert all(float(r["mc_se"]) > 0 for r in rows)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "midas_specd", "--help"], capture_output=True,
                         text=True)
    assert out.returncode == 0 and "simulate" in out.stdout
