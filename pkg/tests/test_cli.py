import json
import subprocess
import sys

import numpy as np
import pytest

from slocc4.cli import label_from_json, main, report_to_json, run_fuzz
from slocc4.qtypes import StateVector, normalize, parse_label, state_to_json
from slocc4.quad_classify import classify4


def write_state(tmp_path, amps, n=4, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps({"n_qubits": n, "amplitudes": [[float(np.real(a)), float(np.imag(a))] for a in amps]}))
    return str(p)


def ghz_amps():
    return normalize(StateVector.from_basis(["0000", "1111"])).amps


class TestClassify:
    def test_ghz_human(self, tmp_path, capsys):
        code = main(["classify", "--input", write_state(tmp_path, ghz_amps())])
        out = capsys.readouterr().out
        assert code == 0 and "family: GHZ (W_{000,000})" in out

    def test_wrong_length(self, tmp_path, capsys):
        code = main(["classify", "--input", write_state(tmp_path, np.ones(15))])
        assert code == 1 and "16" in capsys.readouterr().err

    def test_zero(self, tmp_path):
        assert main(["classify", "--input", write_state(tmp_path, np.zeros(16))]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["classify", "--input", str(tmp_path / "nope.json")]) == 1

    def test_not_json(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("{")
        assert main(["classify", "--input", str(p)]) == 1

    def test_three_qubits(self, tmp_path, capsys):
        amps = normalize(StateVector.from_basis(["001", "010", "100"])).amps
        code = main(["classify", "--input", write_state(tmp_path, amps, n=3), "--format", "json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0 and doc["class"] == "W" and doc["schema"] == 1

    def test_json_round_trip(self, tmp_path, capsys):
        from slocc4.orbits import canonical_state

        s = canonical_state("Phi4", params={"lambda": (0.3 + 0.1j, -0.7)})
        code = main(["classify", "--input", write_state(tmp_path, s.amps), "--format", "json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0 and doc["schema"] == 1
        assert label_from_json(doc) == classify4(s).label
        assert doc["family"] == "W0kPsi_0kPsi" and doc["subcase"] == "iii"
        lam = doc["params"]["invariant"]
        assert abs(complex(*lam) - (0.3 + 0.1j) / -0.7) < 1e-9

    def test_boundary_exit_code(self, tmp_path, capsys):
        # W3 + eps|111>: |disc| / (|W1|^2 |W2|^2) = 2 eps, inside the band around 1e-8
        amps = StateVector.from_basis(["001", "010", "100"]).amps.copy()
        amps[7] = 2e-9
        code = main(["classify", "--input", write_state(tmp_path, amps, n=3)])
        out = capsys.readouterr().out
        assert code == 3 and "class: W" in out and "boundary" in out

    def test_tolerance_flags_validated(self, tmp_path):
        assert main(["classify", "--input", write_state(tmp_path, ghz_amps()), "--tol-rank", "2"]) == 1


class TestCanon:
    def test_w(self, capsys):
        assert main(["canon", "--class", "W"]) == 0
        doc = json.loads(capsys.readouterr().out)
        amps = np.array([complex(*a) for a in doc["amplitudes"]])
        assert np.allclose(amps[[1, 2, 4, 8]], 0.5) and np.count_nonzero(np.abs(amps) > 1e-12) == 4

    def test_psipsi(self, capsys):
        assert main(["canon", "--class", "Psi13Psi24"]) == 0
        doc = json.loads(capsys.readouterr().out)
        s = StateVector([complex(*a) for a in doc["amplitudes"]])
        assert classify4(s).structural.name == "Psi13Psi24"

    def test_unknown(self, capsys):
        assert main(["canon", "--class", "GHZ5"]) == 1
        assert "34" in capsys.readouterr().err

    def test_params(self, capsys):
        code = main(["canon", "--class", "Phi4", "--params", '{"lambda": [[1, 0], [2, 0]]}'])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["class"] == "W[0_1Psi,0_1Psi]"

    def test_bad_params(self):
        assert main(["canon", "--class", "Phi4", "--params", '{"lambda": [[1, 0], [1, 0]]}']) == 1
        assert main(["canon", "--class", "Phi4", "--params", "[1]"]) == 1

    def test_output_is_a_state_file(self, tmp_path, capsys):
        main(["canon", "--class", "W[0_2Psi,GHZ]", "--seed", "4"])
        p = tmp_path / "c.json"
        p.write_text(capsys.readouterr().out)
        assert main(["classify", "--input", str(p)]) == 0
        assert "W[0_2Psi,GHZ]" in capsys.readouterr().out


class TestTableSelftestFuzz:
    def test_table(self, capsys):
        assert main(["table", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert (doc["degenerate"], doc["genuine"], doc["genuine_families"]) == (18, 16, 8)

    def test_selftest(self, capsys):
        assert main(["selftest", "--trials", "200"]) == 0
        assert "FAIL" not in capsys.readouterr().out

    def test_selftest_reports_failure(self, capsys):
        # an absurd rank tolerance makes every entangled state look like a product
        assert main(["selftest", "--tol-rank", "0.9", "--trials", "10"]) == 4
        assert "failed:" in capsys.readouterr().out

    def test_fuzz_single_class(self, capsys):
        assert main(["fuzz", "--class", "W[GHZ,W]", "--trials", "20", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["trials"] == 20 and doc["flips"] == []

    def test_fuzz_deterministic_and_parallel_merge(self):
        labels = [parse_label(n) for n in ("01GHZ", "W[000,GHZ]", "Phi4")]
        a = run_fuzz(labels, trials=5, seed=3)
        b = run_fuzz(labels, trials=5, seed=3, jobs=2)
        assert a.per_class == b.per_class and a.flips == b.flips

    def test_trials_must_be_positive(self):
        assert main(["fuzz", "--trials", "0"]) == 1


def test_report_json_serializable():
    from slocc4.orbits import canonical_state

    for name in ("W[GHZ,W]", "W[000,GHZ]", "01W"):
        rep = classify4(canonical_state(name, seed=2))
        json.dumps(report_to_json(rep))


def test_console_entry_point(tmp_path):
    p = write_state(tmp_path, ghz_amps())
    r = subprocess.run([sys.executable, "-m", "slocc4", "classify", "--input", p], capture_output=True, text=True)
    assert r.returncode == 0 and "W[000,000]" in r.stdout
