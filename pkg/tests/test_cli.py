import json
import subprocess
import sys

import numpy as np

from netfactor import io
from netfactor.cli import main
from netfactor.fixtures import ALTERNATE_CERTIFICATE
from netfactor.simharness import SystemDims, random_system
from netfactor.statespace import StateSpace


def _write(path, doc):
    io.write_document(path, doc)
    return str(path)


def test_dsf_report(capsys):
    assert main(["dsf", "two-channel"]) == 0
    out = capsys.readouterr().out
    assert "Q(2,1) = (-30) / (s^2 + 5 s + 6)" in out
    assert "P(1,1) = (s + 3) / (s^2 + 4 s + 27)" in out


def test_dsf_writes_files(tmp_path, capsys):
    assert main(["dsf", "two-channel", "--out", str(tmp_path), "--quiet"]) == 0
    printed = capsys.readouterr().out.split()
    assert all(p.startswith(str(tmp_path)) for p in printed)
    assert {"report.txt", "q.json", "p.json"} <= {p.split("/")[-1] for p in printed}
    q = io.parse_system(io.read_document(tmp_path / "q.json"))
    assert q.p == q.m == 2


def test_dsf_from_file_with_grid(tmp_path, example_system, capsys):
    path = _write(tmp_path / "sys.json", io.system_document(example_system))
    assert main(["dsf", path, "--grid", "0.1,1,10"]) == 0
    assert main(["dsf", path, "--grid", "0.1,x"]) == 1


def test_enumerate_system(tmp_path, capsys):
    assert main(["enumerate", "two-channel", "--out", str(tmp_path), "--quiet"]) == 0
    names = {p.split("/")[-1] for p in capsys.readouterr().out.split()}
    assert {"solution_0.json", "solution_1.json", "certificate_0.json", "certificate_1.json"} <= names
    s, t, j = io.parse_certificate(io.read_document(tmp_path / "certificate_1.json"))
    assert s.shape == t.shape == (3, 3)


def test_enumerate_from_density(capsys):
    assert main(["enumerate", "two-channel", "--from", "phi", "--precision", "3"]) == 0
    out = capsys.readouterr().out
    assert "1.02" in out and "1.65" in out


def test_full_noise_is_a_continuum(capsys):
    assert main(["enumerate", "two-channel-fullnoise", "--full-noise", "--theta", "-0.1", "0.05"]) == 4
    out = capsys.readouterr().out
    assert "-0.2456" in out and "0.09929" in out


def test_verify(tmp_path, capsys):
    cert = _write(tmp_path / "cert.json", io.certificate_document(ALTERNATE_CERTIFICATE["s"], ALTERNATE_CERTIFICATE["t"]))
    assert main(["verify", "two-channel", "two-channel-alternate", cert, "--tol", "0.02"]) == 0
    assert "PASS" in capsys.readouterr().out
    assert main(["verify", "two-channel", "two-channel-alternate", cert]) == 5


def test_example_listing(tmp_path, capsys):
    assert main(["example", "--list"]) == 0
    assert "two-channel-alternate" in capsys.readouterr().out
    assert main(["example", "two-channel-alternate", "--out", str(tmp_path), "--quiet"]) == 0
    path = capsys.readouterr().out.strip()
    assert "-3.3" in open(path).read()


def test_parse_errors(tmp_path, capsys):
    assert main(["dsf"]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["dsf", "no-such-file.json"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["dsf", str(bad)]) == 1
    assert "invalid JSON" in capsys.readouterr().err


def test_assumption_violation(tmp_path, example_system):
    mixed = StateSpace(example_system.a, example_system.b @ np.array([[1.0, 0.3], [0.0, 1.0]]), example_system.c)
    path = _write(tmp_path / "mixed.json", io.system_document(mixed))
    assert main(["dsf", path]) == 2
    assert main(["enumerate", path]) == 2


def test_numerical_failure(tmp_path, capsys):
    # a Riccati dimension above the enumeration limit
    sys = random_system(SystemDims((0, 0), 13), np.random.default_rng(0))
    path = _write(tmp_path / "big.json", io.system_document(sys))
    assert main(["enumerate", path]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_continuum_exit(tmp_path, capsys):
    sys = random_system(SystemDims((3, 3, 0), 8), np.random.default_rng(0))
    path = _write(tmp_path / "cont.json", io.system_document(sys))
    assert main(["enumerate", path]) == 4


def test_tolerance_from_environment(monkeypatch, tmp_path):
    cert = _write(tmp_path / "cert.json", io.certificate_document(ALTERNATE_CERTIFICATE["s"], ALTERNATE_CERTIFICATE["t"]))
    monkeypatch.setenv("NETFACTOR_TOL", "0.02")
    assert main(["verify", "two-channel", "two-channel-alternate", cert]) == 0
    assert main(["verify", "two-channel", "two-channel-alternate", cert, "--tol", "1e-8"]) == 5
    monkeypatch.setenv("NETFACTOR_TOL", "abc")
    assert main(["dsf", "two-channel"]) == 1


def test_simulate(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"trials": 50, "seed": 1, "p_range": [2, 3], "l2_range": [0, 2],
                                  "l_range": [0, 6]}))
    assert main(["simulate", str(config), "--out", str(tmp_path), "--quiet"]) == 0
    assert capsys.readouterr().out.split() == [str(tmp_path / "trials.csv"), str(tmp_path / "summary.csv")]
    assert len((tmp_path / "trials.csv").read_text().splitlines()) == 51
    config.write_text(json.dumps({"trails": 5}))
    assert main(["simulate", str(config)]) == 1


def test_console_entry_point():
    done = subprocess.run([sys.executable, "-m", "netfactor.cli", "example", "--list"],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0
    assert "two-channel" in done.stdout
