import csv
import io
import json
import subprocess
import sys

import pytest

from heisenrep.cli import ENV_CONFIG, main

FAST = ["--suite", "sp2r-casimirs", "--window", "-3:3:8", "--fock-m-max", "6"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --------------------------------------------------------------------------
# check


def test_check_passes_and_emits_json(capsys):
    code, out, _ = run(capsys, "check", "--lambda", "-1/4", *FAST)
    assert code == 0
    rep = json.loads(out)
    assert rep["summary"] == {"checks": 8, "passed": 8, "failed": 0}
    assert rep["config"]["lambda"] == ["-1/4"]


def test_check_exit_one_on_failure(capsys):
    code, out, err = run(capsys, "check", "--suite", "gauss-actions", "--format", "text")
    assert code == 1
    assert "FAIL" in out and "(-tau/2)^n" in err


def test_exact_tolerance_cannot_be_loosened(capsys):
    code, _, err = run(capsys, "check", *FAST, "--tol", "exact=1e-3")
    assert code == 2 and "--tol" in err


@pytest.mark.parametrize("argv, flag", [
    (["--lambda", "0.25"], "--lambda"),
    (["--lambda", "1/2"], "--lambda"),
    (["--lambda", "abc"], "--lambda"),
    (["--suite", "nope"], "--suite"),
    (["--window", "1:0:4"], "--window"),
    (["--window", "1:2"], "--window"),
    (["--fock-m-max", "2"], "--fock-m-max"),
    (["--workers", "0"], "--workers"),
    (["--tol", "bogus=1"], "--tol"),
    (["--tol", "quadrature"], "--tol"),
])
def test_check_usage_errors_name_the_flag(capsys, argv, flag):
    code, _, err = run(capsys, "check", *argv)
    assert code == 2
    assert err.startswith(f"heisenrep: error: {flag}")


def test_decimal_lambda_message(capsys):
    _, _, err = run(capsys, "check", "--lambda", "-0.25")
    assert "decimal" in err


def test_check_deterministic_output(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["check", *FAST, "-o", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


# --------------------------------------------------------------------------
# config files


def test_config_file_and_override(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "h.cfg"
    cfg.write_text("# comment\nlambda = -3/10\nwindow = -3:3:8\nfock_m_max = 6\n"
                   "suites = sp2r-casimirs\ntol.float_algebra = 1e-9\n")
    monkeypatch.setenv(ENV_CONFIG, str(cfg))
    code, out, _ = run(capsys, "check")
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["lambda"] == ["-3/10"]
    assert rep["config"]["tolerances"]["float_algebra"] == "1e-09"
    code, out, _ = run(capsys, "check", "--lambda", "-1/4")
    assert json.loads(out)["config"]["lambda"] == ["-1/4"]


@pytest.mark.parametrize("text, needle", [
    ("colour = red\n", "unknown key"),
    ("lambda\n", "expected key = value"),
    ("lambda = 0.1\n", "key 'lambda'"),
    ("quadrature.nodes = 8\n", "quadrature"),
])
def test_bad_config_file(tmp_path, capsys, text, needle):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, _, err = run(capsys, "check", "--config", str(cfg))
    assert code == 2 and needle in err


def test_missing_config_file(capsys, tmp_path):
    code, _, err = run(capsys, "check", "--config", str(tmp_path / "none.cfg"))
    assert code == 2 and "--config" in err


# --------------------------------------------------------------------------
# other subcommands


def test_spectrum_nonfock(capsys):
    code, out, _ = run(capsys, "spectrum", "--lambda", "-1/4", "--m-max", "2")
    assert code == 0
    values = [line.split("\t")[3] for line in out.splitlines()[1:] if not line.startswith("#")]
    assert "-9/2" in values
    assert "# Sp L0:" in out


def test_spectrum_fock(capsys):
    code, out, _ = run(capsys, "spectrum", "--rep", "fock-h2", "--m-max", "3", "--mode", "1")
    assert code == 0
    assert [line.split("\t")[2] for line in out.splitlines()[1:]] == ["0", "1", "2", "3"]


def test_kernel(capsys):
    code, out, _ = run(capsys, "kernel", "--lambda", "-3/10", "--p-window", "-3:3", "--j-max", "8")
    assert code == 0
    assert "interlace L-\t0" in out
    assert "in kernel f=(-1, 1)\tTrue" in out


def test_kernel_validation(capsys):
    code, _, err = run(capsys, "kernel", "--p-window", "0:1")
    assert code == 2 and "--p-window" in err
    code, _, err = run(capsys, "kernel", "--j-max", "2")
    assert code == 2 and "--j-max" in err


def test_dump_operator(capsys):
    code, out, _ = run(capsys, "dump-operator", "--name", "phibar2", "--lambda", "-3/10",
                       "--p-window", "-1:1", "--m-max", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    entry = next(r for r in rows if (r["col_p"], r["col_m"]) == ("0", "2"))
    # 2 lam + p + 1 - m = -3/5 - 1
    assert (entry["row_p"], entry["row_m"], entry["value"]) == ("1", "2", "-8/5")


def test_report_roundtrip(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert main(["check", *FAST, "-o", str(path)]) == 0
    code, out, _ = run(capsys, "report", "-i", str(path), "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "suite,check,anchor,residual,tolerance,pass"
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    code, _, err = run(capsys, "report", "-i", str(bad))
    assert code == 2 and "--input" in err


def test_argparse_errors_exit_two(capsys):
    assert main(["check", "--format", "yaml"]) == 2
    assert main([]) == 2


def test_console_script_subprocess():
    proc = subprocess.run([sys.executable, "-m", "heisenrep", "check", "--lambda", "-1/4", *FAST,
                           "--format", "text"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip().endswith("8/8 checks passed, 0 failed")
