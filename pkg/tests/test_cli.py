import csv
import json
import math
import subprocess
import sys

import pytest

from symsep.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def states(tmp_path):
    paths = {}
    specs = {
        "scs": ["--builder", "scs", "--n", 4, "--theta", 1.0, "--phi", 0.5],
        "w": ["--builder", "dicke", "--n", 3, "--k", 1],
        "mix": ["--builder", "mixture", "--n", 3, "--atoms", "0.3:0.4:1.0,0.7:2.0:4.0"],
        "rand": ["--builder", "random", "--n", 3, "--seed", 5],
    }
    for name, spec in specs.items():
        paths[name] = tmp_path / f"{name}.json"
        assert run("state", *spec, "-o", paths[name]) == 0
    return paths


def test_certify_exit_codes(states, capsys):
    assert run("certify", states["scs"]) == 0
    assert run("certify", states["w"]) == 10
    out = capsys.readouterr().out
    assert "verdict: Classical" in out and "verdict: NonClassical" in out


def test_certify_recovers_mixture(states, tmp_path):
    out = tmp_path / "cert.json"
    assert run("certify", states["mix"], "-o", out) == 0
    cert = json.loads(out.read_text())
    weights = sorted(a["weight"] for a in cert["decomposition"])
    assert weights == pytest.approx([0.3, 0.7], abs=1e-6)


def test_certificate_is_byte_deterministic(states, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("certify", states["rand"], "-o", a)
    run("certify", states["rand"], "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_state_files_are_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run("state", "--builder", "random", "--n", 4, "--seed", 9, "--rank", 2, "-o", p)
    assert a.read_bytes() == b.read_bytes()


def test_pfunc_export(states, tmp_path, capsys):
    out = tmp_path / "p.csv"
    assert run("pfunc", states["scs"], "-o", out) == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["theta", "phi", "weight", "p_value"]
    text = capsys.readouterr().out
    assert "integral = 1.000000000" in text and "diagnostic" in text


def test_witness_report(states, capsys):
    assert run("witness", states["w"]) == 0
    out = capsys.readouterr().out
    conc = float(out.split("pair concurrence = ")[1].split()[0])
    assert conc == pytest.approx(2 / 3, abs=1e-12)
    assert "xi2 =" in out


def test_calibrate_prints_lambdas(capsys):
    assert run("calibrate", "--n", 2) == 0
    first = capsys.readouterr().out.splitlines()[0]
    assert float(first.split("=")[1]) == pytest.approx(math.sqrt(4 * math.pi / 3), rel=1e-13)


def test_calibrate_too_coarse_exit(capsys):
    assert run("calibrate", "--n", 4, "--order", 2) == 3


@pytest.mark.parametrize("spec", [
    ["--builder", "dicke", "--n", 3, "--k", 7],
    ["--builder", "dicke", "--n", 3],
    ["--builder", "random", "--n", 3, "--seed", 1, "--rank", 9],
    ["--builder", "mixture", "--n", 2, "--atoms", "0.5:1:1,0.6:2:2"],
    ["--builder", "mixture", "--n", 2, "--atoms", "junk"],
    ["--builder", "scs", "--n", 0, "--theta", 1, "--phi", 1],
])
def test_bad_builder_arguments(spec, tmp_path, capsys):
    assert run("state", *spec, "-o", tmp_path / "x.json") == 2
    assert "error:" in capsys.readouterr().err


def test_bad_tolerance(states):
    assert run("certify", states["scs"], "--epsilon-sep", 0) == 2


def test_missing_state_file(tmp_path):
    assert run("certify", tmp_path / "nope.json") == 2


def test_malformed_state_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n_qubits": 2, "kind": "pure", "amplitudes": [[1, 0], [1, 0], [0, 0]]}')
    assert run("certify", p) == 2


def test_survey_csv_and_report(tmp_path, capsys):
    out, rep = tmp_path / "s.csv", tmp_path / "r.json"
    assert run("survey", "--n", "2-3", "--count", 10, "--seed", 4, "--controls", 2, "-o", out, "--report", rep) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 24
    assert all(r["verdict"] == "Classical" for r in rows if r["kind"] == "control")
    assert json.loads(rep.read_text())["violations"] == 0


@pytest.mark.parametrize("bad", [["--n", "3-1"], ["--n", "x"], ["--count", 0]])
def test_survey_bad_arguments(bad, tmp_path):
    args = {"--n": "2", "--count": 3}
    args.update(dict(zip(bad[::2], bad[1::2])))
    flat = [x for kv in args.items() for x in kv]
    assert run("survey", *flat, "--seed", 1, "-o", tmp_path / "s.csv") == 2


def test_module_entry_point(tmp_path):
    p = tmp_path / "g.json"
    done = subprocess.run([sys.executable, "-m", "symsep", "state", "--builder", "ghz", "--n", "3", "-o", str(p)],
                          capture_output=True, text=True)
    assert done.returncode == 0 and p.exists()
