#!/usr/bin/env python3
"""End-to-end tests of the command-line tools through main()."""

import json
from pathlib import Path

import numpy as np
import pytest

import main
from csv_io import read_complex, read_points, read_table, write_complex, write_points
from errors import DataFileError


@pytest.fixture(autouse=True)
def no_log_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"log_file": ""}))
    return config


def run(*argv):
    return main.main(list(argv))


def test_type1_single_point(tmp_path):
    write_points(str(tmp_path / "x.csv"), [0.0])
    write_complex(str(tmp_path / "c.csv"), [1.0])
    out = tmp_path / "f.csv"
    code = run("transform", "type1", "--points", "x.csv", "--data", "c.csv", "--modes", "8",
               "--tol", "1e-9", "--out", str(out))
    assert code == 0
    f = read_complex(str(out))
    assert f.size == 8
    np.testing.assert_allclose(f, np.ones(8), atol=1e-8)


def test_transform_summary_reports_beta(tmp_path, capsys):
    write_points(str(tmp_path / "x.csv"), np.linspace(-3, 3, 11))
    write_complex(str(tmp_path / "c.csv"), np.ones(11))
    code = run("transform", "type1", "--points", "x.csv", "--data", "c.csv", "--modes", "128",
               "--width", "10", "--gamma", "1", "--sigma", "2", "--out", "f.csv")
    assert code == 0
    summary = capsys.readouterr().out
    assert "beta=23.5619" in summary
    assert "n=256" in summary


def test_type2_matches_direct_sum(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.uniform(-np.pi, np.pi, 20)
    f = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    write_points(str(tmp_path / "x.csv"), x)
    write_complex(str(tmp_path / "f.csv"), f)
    assert run("transform", "type2", "--points", "x.csv", "--data", "f.csv", "--out", "c.csv") == 0
    k = np.arange(-8, 8)
    exact = np.exp(-1j * np.outer(x, k)) @ f
    np.testing.assert_allclose(read_complex("c.csv"), exact, atol=1e-8 * np.sum(np.abs(f)))


def test_csv_stdout_keeps_summary_off_the_data(tmp_path, capsys):
    write_points(str(tmp_path / "x.csv"), [0.5])
    write_complex(str(tmp_path / "c.csv"), [2.0])
    assert run("transform", "type1", "--points", "x.csv", "--data", "c.csv", "--modes", "4") == 0
    captured = capsys.readouterr()
    lines = captured.out.strip().splitlines()
    assert lines[0] == "re,im"
    assert len(lines) == 5
    assert "type1:" in captured.err


def test_malformed_data_exits_with_data_error(tmp_path, capsys):
    write_points(str(tmp_path / "x.csv"), [0.0, 1.0])
    (tmp_path / "c.csv").write_text("re,im\n1.0,0.0\nabc,0.0\n")
    code = run("transform", "type1", "--points", "x.csv", "--data", "c.csv", "--modes", "8")
    assert code == 2
    assert "c.csv:3" in capsys.readouterr().err


def test_wrong_header_exits_with_data_error(tmp_path):
    (tmp_path / "x.csv").write_text("y\n0.1\n")
    write_complex(str(tmp_path / "c.csv"), [1.0])
    assert run("transform", "type1", "--points", "x.csv", "--data", "c.csv", "--modes", "8") == 2


def test_length_mismatch_exits_with_data_error(tmp_path):
    write_points(str(tmp_path / "x.csv"), [0.0, 1.0, 2.0])
    write_complex(str(tmp_path / "c.csv"), [1.0, 2.0])
    assert run("transform", "type1", "--points", "x.csv", "--data", "c.csv", "--modes", "8") == 2


def test_odd_coefficient_count_exits_with_data_error(tmp_path, capsys):
    write_points(str(tmp_path / "x.csv"), [0.0, 1.0])
    write_complex(str(tmp_path / "f.csv"), [1.0, 2.0, 3.0])
    assert run("transform", "type2", "--points", "x.csv", "--data", "f.csv") == 2
    assert "f.csv" in capsys.readouterr().err


def test_missing_file_exits_with_data_error(tmp_path):
    write_complex(str(tmp_path / "c.csv"), [1.0])
    assert run("transform", "type1", "--points", "nope.csv", "--data", "c.csv", "--modes", "8") == 2


def test_usage_errors_exit_with_one(tmp_path):
    write_points(str(tmp_path / "x.csv"), [0.0])
    write_complex(str(tmp_path / "c.csv"), [1.0])
    # type1 needs --modes
    assert run("transform", "type1", "--points", "x.csv", "--data", "c.csv") == 1
    # odd N is a parameter error
    assert run("transform", "type1", "--points", "x.csv", "--data", "c.csv", "--modes", "7") == 1
    with pytest.raises(SystemExit) as exc:
        run("transform", "type3")
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        run("kernel-table", "--beta", "10", "--bogus")
    assert exc.value.code == 1
    assert run() == 1


def test_kernel_table(tmp_path):
    assert run("kernel-table", "--beta", "12", "--grid", "100", "--which", "es,kb,sleph,slep,pswf",
               "--out", "k.csv") == 0
    header, rows = read_table("k.csv")
    assert header == ["z", "es", "kb", "sleph", "slep", "pswf"]
    assert len(rows) == 101
    assert float(rows[0][0]) == -1.0 and float(rows[-1][0]) == 1.0
    assert float(rows[50][1]) == 1.0
    assert float(rows[50][5]) == pytest.approx(1.0, rel=1e-13)
    # slep is undefined in the central region: blank cells
    assert rows[50][4] == ""
    assert rows[0][4] != ""


def test_kernel_table_ratio_to_pswf(tmp_path):
    assert run("kernel-table", "--beta", "20", "--grid", "40", "--which", "es,pswf",
               "--ratio-to", "pswf", "--out", "k.csv") == 0
    _, rows = read_table("k.csv")
    assert all(float(row[2]) == pytest.approx(1.0) for row in rows)


def test_kernel_table_rejects_unknown_column():
    assert run("kernel-table", "--beta", "10", "--which", "es,gauss") == 1


def test_ft_table(tmp_path):
    beta = 30.0
    assert run("ft-table", "--beta", "30", "--xi-max", "60", "--samples", "121", "--out", "ft.csv") == 0
    header, rows = read_table("ft.csv")
    assert header == ["xi", "rho", "quad", "asym", "kb", "sinc", "absdiff"]
    for row in rows:
        assert float(row[1]) == float(row[0]) / beta
    # blank asymptotic cells within 0.02 of the cutoff
    at_cutoff = [row for row in rows if abs(float(row[1]) - 1.0) < 0.02]
    assert at_cutoff and all(row[3] == "" for row in at_cutoff)
    below = [row for row in rows if float(row[1]) <= 0.9]
    for row in below:
        assert abs(float(row[3]) / float(row[2]) - 1) <= 0.05


def test_error_sweep_is_deterministic(tmp_path):
    args = ("error-sweep", "--w-min", "4", "--w-max", "6", "--modes", "32", "--points", "50",
            "--trials", "2", "--seed", "3")
    assert run(*args, "--out", "a.csv") == 0
    assert run(*args, "--threads", "2", "--out", "b.csv") == 0
    assert Path("a.csv").read_text() == Path("b.csv").read_text()
    header, rows = read_table("a.csv")
    assert header[:3] == ["w", "beta", "eps_inf_est"]
    assert header[-2:] == ["emp_l2_rel_t1", "emp_l2_rel_t2"]
    assert [int(row[0]) for row in rows] == [4, 5, 6]
    for row in rows:
        eps = float(row[2])
        assert float(row[3]) <= eps and float(row[4]) <= eps


def test_error_sweep_kb_adds_bound_column(tmp_path):
    assert run("error-sweep", "--kernel", "kb", "--w-min", "5", "--w-max", "5", "--modes", "16",
               "--points", "20", "--trials", "1", "--out", "kb.csv") == 0
    header, rows = read_table("kb.csv")
    assert header[-1] == "kb_error_bound"
    assert float(rows[0][3]) <= float(rows[0][-1])


def test_checks_pswf_suite(tmp_path):
    assert run("checks", "--suite", "pswf", "--out", "checks.csv") == 0
    header, rows = read_table("checks.csv")
    assert header == ["suite", "check", "measured", "target", "pass"]
    assert rows and all(row[4] == "true" for row in rows)


@pytest.mark.slow
def test_checks_all_suites(tmp_path):
    assert run("checks", "--suite", "all", "--out", "checks.csv") == 0


def test_config_overrides_defaults(tmp_path):
    path = tmp_path / "custom.json"
    path.write_text(json.dumps({"sigma": 1.5, "trials": 2}))
    config = main.load_config(str(path))
    assert config["sigma"] == 1.5
    assert config["trials"] == 2
    assert config["gamma"] == main.DEFAULT_CONFIG["gamma"]
    assert main.load_config(str(tmp_path / "missing.json")) == main.DEFAULT_CONFIG


def test_csv_round_trip(tmp_path):
    values = np.array([1 / 3 + 2j / 7, -1e-300 + 0j, 12345.678901234567 - 1e20j])
    write_complex(str(tmp_path / "v.csv"), values)
    np.testing.assert_array_equal(read_complex(str(tmp_path / "v.csv")), values)
    x = np.array([np.pi / 7, -2.0])
    write_points(str(tmp_path / "p.csv"), x)
    np.testing.assert_array_equal(read_points(str(tmp_path / "p.csv")), x)


def test_csv_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("re,im\n1,2\n3\n")
    with pytest.raises(DataFileError) as exc:
        read_complex(str(path))
    assert exc.value.line == 3
    path.write_text("x\n0.1\ninf\n")
    with pytest.raises(DataFileError) as exc:
        read_points(str(path))
    assert exc.value.line == 3
    path.write_text("x\n")
    with pytest.raises(DataFileError):
        read_points(str(path))


def test_example_script_runs(capsys):
    import example_usage
    example_usage.example_usage()
    example_usage.example_error_rate()
    out = capsys.readouterr().out
    assert "Type 1 relative error" in out
    assert "w   eps_inf" in out


if __name__ == "__main__":
    pytest.main([str(Path(__file__)), "--tb=auto"])
