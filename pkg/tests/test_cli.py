import subprocess
import sys

import numpy as np
import pytest

from qsnapc import io as qio
from qsnapc.cli import (EXIT_FAILURE, EXIT_FORMAT, EXIT_OK, EXIT_USAGE, EXIT_VERSION,
                        main, parse_int_list, parse_window)
from qsnapc.synth import SynthesisOptions, expand_givens
from qsnapc.verify import simulate


def _kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, _kv(out), err


def test_parse_helpers():
    assert parse_int_list("0..3,10") == [0, 1, 2, 3, 10]
    assert parse_int_list("1,2,4") == [1, 2, 4]
    assert parse_window("8,64") == (8.0, 64.0)
    assert main(["sweep", "qft", "--dim", "8", "--m", "x", "-o", "/dev/null"]) == EXIT_USAGE


def test_gen_compile_verify(tmp_path, capsys):
    u, s = tmp_path / "u.txt", tmp_path / "s.txt"
    code, out, _ = run(capsys, "gen", "qft", "--n", 6, "--dim", 8, "-o", u)
    assert code == EXIT_OK and out["dim"] == "8"
    code, comp, _ = run(capsys, "compile", u, "-o", s, "--m", 4)
    assert code == EXIT_OK
    assert comp["source_checksum"] == out["checksum"]
    assert int(comp["gate_count"]) == int(comp["snap_count"]) + int(comp["disp_count"])
    code, ver, _ = run(capsys, "verify", s, u)
    assert code == EXIT_OK
    assert ver["checksum_match"] == "true" and ver["pass"] == "true"
    assert float(ver["infidelity_raw"]) < 1e-2
    assert ver["gate_count"] == comp["gate_count"]


def test_gen_rejects_n_above_dim(tmp_path, capsys):
    code, _, err = run(capsys, "gen", "qft", "--n", 10, "--dim", 8, "-o", tmp_path / "u")
    assert code == EXIT_USAGE and "N exceeds dim" in err


def test_gen_haar_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "gen", "haar", "--dim", 6, "--seed", 7, "-o", a)
    run(capsys, "gen", "haar", "--dim", 6, "--seed", 7, "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_identity_compiles_to_nothing(tmp_path, capsys):
    u, s = tmp_path / "u", tmp_path / "s"
    qio.write_matrix(u, np.eye(5))
    code, out, _ = run(capsys, "compile", u, "-o", s)
    assert code == EXIT_OK and out["gate_count"] == "0"
    code, out, _ = run(capsys, "verify", s, u)
    assert code == EXIT_OK and float(out["infidelity_raw"]) == 0.0


def test_non_unitary_input(tmp_path, capsys):
    u = tmp_path / "u"
    qio.write_matrix(u, np.diag([1.0, 1.0, 1.01]))
    code, _, err = run(capsys, "compile", u, "-o", tmp_path / "s")
    assert code == EXIT_FAILURE and "unitarity_deviation" in err


def test_verify_failures(tmp_path, capsys):
    u, w, s, e = (tmp_path / n for n in "uwse")
    run(capsys, "gen", "haar", "--dim", 6, "--seed", 1, "-o", u)
    run(capsys, "gen", "haar", "--dim", 6, "--seed", 2, "-o", w)
    run(capsys, "gen", "haar", "--dim", 5, "--seed", 2, "-o", e)
    run(capsys, "compile", u, "-o", s, "--m", 4)
    code, out, _ = run(capsys, "verify", s, w)
    assert code != EXIT_OK and out["checksum_match"] == "false" and out["pass"] == "false"
    code, _, err = run(capsys, "verify", s, e)
    assert code == EXIT_FAILURE and "dimension mismatch" in err


def test_format_and_version_errors(tmp_path, capsys):
    bad, future = tmp_path / "bad", tmp_path / "future"
    bad.write_text("qsnapc-matrix 1\ndim 2\n1 0\n")
    future.write_text("qsnapc-matrix 2\ndim 2\n")
    assert run(capsys, "compile", bad, "-o", tmp_path / "s")[0] == EXIT_FORMAT
    assert run(capsys, "compile", future, "-o", tmp_path / "s")[0] == EXIT_VERSION
    assert run(capsys, "compile", tmp_path / "missing", "-o", tmp_path / "s")[0] == EXIT_USAGE


def test_exact_sequence_verifies(tmp_path, capsys):
    seq = expand_givens(12, 3, 0.8, 2)
    s, u = tmp_path / "s", tmp_path / "u"
    qio.write_sequence(s, seq, SynthesisOptions(m=2, merge=False))
    qio.write_matrix(u, simulate(seq))
    code, out, _ = run(capsys, "verify", s, u)
    assert code == EXIT_OK and float(out["infidelity_raw"]) <= 1e-12


def test_sweep_givens_csv(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "givens", "--dim", 16, "--k", "0..13", "--no-timings"]
    code, out, _ = run(capsys, *args, "-o", a)
    assert code == EXIT_OK and out["records"] == "280"
    assert 5.5 <= float(out["slope_min"]) <= float(out["slope_max"]) <= 6.4
    run(capsys, *args, "-o", b)
    assert a.read_bytes() == b.read_bytes()
    assert len(qio.read_sweep_csv(a)) == 280
    assert run(capsys, "sweep", "givens", "--dim", 16, "--k", 14, "-o", a)[0] == EXIT_FAILURE


def test_sweep_qft(tmp_path, capsys):
    code, out, _ = run(capsys, "sweep", "qft", "--dim", 16, "--n", 14, "--m", "1,2,4,8,16,32",
                       "--fit-window", "8,32", "-o", tmp_path / "q.csv")
    assert code == EXIT_OK and out["records"] == "6"
    assert -4.4 <= float(out["slope"]) <= -3.6


def test_module_entry_point(tmp_path):
    u = tmp_path / "u"
    proc = subprocess.run([sys.executable, "-m", "qsnapc", "gen", "qft", "--n", "4", "-o", str(u)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "dim=4" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "qsnapc", "bogus"], capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
