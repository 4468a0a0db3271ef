import csv
import json
import math

import numpy as np
import pytest

from symtest.cli import main
from symtest.config import parse_config
from symtest.errors import ParseError, ValidationError
from symtest.group import close_generators
from symtest.report import CSV_COLUMNS

import oracle

D3_GENS = [{"gate": "CNOT", "qubits": [0, 1]}, {"gate": "SWAP", "qubits": [0, 1]}]
Z_GENS = [{"gate": "Z", "qubits": [0]}, {"gate": "Z", "qubits": [1]}]
NMR = {"type": "nmr", "omega1": 1, "omega2": 2, "j": 0.1}


def _config(tmp_path, **overrides):
    doc = {
        "hamiltonian": NMR,
        "group": {"generators": D3_GENS},
        "times": {"linspace": [0, 6.28, 50]},
        "methods": ["trace"],
    }
    doc.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestParseConfig:
    def test_minimal(self, tmp_path):
        cfg = parse_config(_config(tmp_path).read_text())
        assert len(cfg.times) == 50 and cfg.times[-1] == pytest.approx(6.28)
        assert cfg.methods == ("trace",)
        assert close_generators(cfg.generators, qubits=cfg.qubits).order == 6

    def test_empty_methods(self, tmp_path):
        with pytest.raises(ValidationError):
            parse_config(_config(tmp_path, methods=[]).read_text())

    def test_non_unitary_generator(self, tmp_path):
        m = np.eye(4, dtype=complex)
        m[0, 1] = 1e-3
        entries = [[z.real, z.imag] for z in m.reshape(-1)]
        text = _config(tmp_path, group={"generators": [{"matrix": entries}]}).read_text()
        with pytest.raises(ValidationError) as info:
            parse_config(text)
        assert info.value.invariant == "NotUnitary"

    def test_syntax_error_has_line(self):
        with pytest.raises(ParseError) as info:
            parse_config('{\n  "hamiltonian": {,\n}')
        assert info.value.line == 2

    def test_missing_field_named(self, tmp_path):
        with pytest.raises(ParseError) as info:
            parse_config(json.dumps({"hamiltonian": {"type": "nmr", "omega1": 1, "omega2": 2}, "times": [1]}))
        assert info.value.field == "hamiltonian.j"

    def test_pauli_and_matrix_hamiltonians(self):
        cfg = parse_config(json.dumps({
            "hamiltonian": {"type": "pauli", "qubits": 2, "terms": ["-0.5 * ZI", "0.25 * XX"]},
            "times": [0.1, 0.2],
        }))
        assert cfg.hamiltonian.terms[1].word == "XX"
        entries = [[v, 0] for v in (1, 0, 0, -1)]
        cfg = parse_config(json.dumps({"hamiltonian": {"type": "matrix", "entries": entries}, "times": [1]}))
        np.testing.assert_array_equal(cfg.hamiltonian.matrix(), np.diag([1, -1]))

    def test_bad_word_length(self):
        with pytest.raises(ValidationError):
            parse_config(json.dumps({"hamiltonian": {"type": "pauli", "qubits": 2, "terms": ["1 * Z"]},
                                     "times": [1]}))

    def test_unknown_method(self, tmp_path):
        with pytest.raises(ValidationError):
            parse_config(_config(tmp_path, methods=["magic"]).read_text())


class TestSweep:
    def test_symmetric_flat_curve(self, tmp_path):
        out = tmp_path / "flat.csv"
        cfg = _config(tmp_path, group={"generators": Z_GENS})
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        rows = _rows(out)
        assert len(rows) == 50
        assert all(abs(float(r["p_trace"]) - 1) < 1e-10 for r in rows)
        assert all(r["verdict"] == "symmetric" for r in rows)

    def test_header_and_format(self, tmp_path):
        out = tmp_path / "s.csv"
        main(["sweep", "--config", str(_config(tmp_path, times=[0.5])), "--out", str(out)])
        raw = out.read_bytes()
        assert b"\r" not in raw
        lines = raw.decode("utf-8").splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        cells = lines[1].split(",")
        assert cells[0] == "%.12e" % 0.5
        assert cells[CSV_COLUMNS.index("p_choi")] == ""

    def test_asymmetric_matches_oracle(self, tmp_path):
        times = [0.2, 0.4, 0.6, 1.0, 2.0]
        out = tmp_path / "asym.csv"
        cfg = _config(tmp_path, times=times, methods=["trace", "choi", "circuit", "series"])
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        for row, t in zip(_rows(out), times):
            expected = float(oracle.p_acc(oracle.mp.mpf(t)).real)
            assert float(row["p_trace"]) < 1
            assert abs(float(row["p_trace"]) - expected) < 1e-9
            assert abs(float(row["p_choi"]) - expected) < 1e-9
            assert row["verdict"] == "asymmetric"

    def test_shots_byte_identical(self, tmp_path):
        cfg = _config(tmp_path, times=[0.5, 1.0], methods=["shots"], shots=100_000, seed=7)
        a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
        assert main(["sweep", "--config", str(cfg), "--out", str(a), "--jobs", "1"]) == 0
        assert main(["sweep", "--config", str(cfg), "--out", str(b), "--jobs", "1"]) == 0
        assert main(["sweep", "--config", str(cfg), "--out", str(c), "--jobs", "3"]) == 0
        assert a.read_bytes() == b.read_bytes() == c.read_bytes()
        d = tmp_path / "d.csv"
        main(["sweep", "--config", str(cfg), "--out", str(d), "--seed", "8"])
        assert d.read_bytes() != a.read_bytes()

    def test_json_output(self, tmp_path):
        out = tmp_path / "s.json"
        cfg = _config(tmp_path, times=[1.0], methods=["trace", "shots"], shots=1000)
        assert main(["sweep", "--config", str(cfg), "--out", str(out), "--format", "json"]) == 0
        data = json.loads(out.read_text())
        assert data["group_order"] == 6
        point = data["points"][0]
        assert point["shots"]["shots"] == 1000
        assert point["p_trace_clipped"] == pytest.approx(point["p_trace"])

    def test_consistency_failure_exit_code(self, tmp_path, monkeypatch, capsys):
        import symtest.report as report

        monkeypatch.setattr(report.symcore, "acceptance_probability_choi", lambda h, rep, t: 0.0)
        cfg = _config(tmp_path, times=[1.0], methods=["trace", "choi"])
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
        assert "consistency" in capsys.readouterr().err


class TestOtherCommands:
    def test_group(self, tmp_path, capsys):
        assert main(["group", "--config", str(_config(tmp_path))]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["order"] == 6 and data["closure"] == "exact" and data["projector_idempotent"]

    def test_test_command(self, tmp_path, capsys):
        cfg = _config(tmp_path, methods=["trace", "choi", "series", "circuit"])
        assert main(["test", "--config", str(cfg), "--t", "1.0"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["p_trace"] == pytest.approx(0.51956066359832469, abs=1e-12)
        assert data["gentle_measurement"] == [False, False]
        assert data["group_order"] == 6

    def test_trotter(self, tmp_path):
        cfg = _config(tmp_path, hamiltonian={"type": "pauli", "qubits": 2, "terms": ["1 * XI", "1 * ZZ"]},
                      trotter={"steps": [4, 8, 16]})
        out = tmp_path / "t.csv"
        assert main(["trotter", "--config", str(cfg), "--t", "0.5", "--out", str(out)]) == 0
        errs = [float(r["error"]) for r in _rows(out)]
        assert errs[0] > errs[1] > errs[2] > 0

    def test_trotter_needs_pauli_form(self, tmp_path):
        cfg = _config(tmp_path, hamiltonian={"type": "matrix", "entries": [[1, 0], [0, 0], [0, 0], [-1, 0]]},
                      group={"generators": []})
        assert main(["trotter", "--config", str(cfg)]) == 1

    def test_variational(self, tmp_path, capsys):
        cfg = _config(tmp_path, variational={"layers": 2, "restarts": 2, "max_iters": 30})
        assert main(["variational", "--config", str(cfg), "--t", "1.0"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["final_value"] <= data["oracle_optimum"] + 1e-9
        assert len(data["restart_values"]) == 2

    def test_bad_config_exit_code(self, tmp_path):
        assert main(["sweep", "--config", str(_config(tmp_path, methods=[]))]) == 1
        assert main(["sweep", "--config", str(tmp_path / "missing.json")]) == 1

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as info:
            main(["sweep"])
        assert info.value.code == 1


@pytest.mark.parametrize("name", ["nmr_d3.json", "nmr_z2z2.json", "trotter_xi_zz.json"])
def test_example_configs_parse(name):
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "configs" / name
    cfg = parse_config(path.read_text())
    assert cfg.times
