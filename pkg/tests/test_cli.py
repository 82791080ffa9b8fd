import json
import math

import pytest

from phasemix.circuit import parse, serialize, two_qubit_count, zphase, Circuit
from phasemix.cli import EXIT_CAP, EXIT_CONFIG, EXIT_IO, EXIT_OK, main
from phasemix.generators import qft


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenerate:
    def test_qft_round_trip(self, tmp_path, capsys):
        out = tmp_path / "qft.circ"
        code, _, _ = run(capsys, "generate", "qft", "--qubits", "6", "--out", str(out))
        assert code == EXIT_OK
        assert parse(out.read_text()) == qft(6)

    def test_rqc_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.circ", tmp_path / "b.circ"
        run(capsys, "generate", "rqc", "--qubits", "5", "--depth", "80", "--seed", "9", "--out", str(a))
        run(capsys, "generate", "rqc", "--qubits", "5", "--depth", "80", "--seed", "9", "--out", str(b))
        assert a.read_text() == b.read_text()


class TestSimplifyCommand:
    def test_writes_simplified_file(self, tmp_path, capsys):
        src = tmp_path / "c.circ"
        src.write_text("qubits 2\ncnot 0 1\ncnot 0 1\nh 0\n")
        out = tmp_path / "s.circ"
        code, _, _ = run(capsys, "simplify", "--in", str(src), "--out", str(out), "--strategy", "best")
        assert code == EXIT_OK
        assert parse(out.read_text()).gates == parse("qubits 2\nh 0\n").gates

    def test_missing_file_is_io_error(self, tmp_path, capsys):
        code, _, err = run(capsys, "simplify", "--in", str(tmp_path / "nope"), "--out", str(tmp_path / "o"))
        assert code == EXIT_IO and "error" in err

    def test_malformed_file_is_config_error(self, tmp_path, capsys):
        src = tmp_path / "bad.circ"
        src.write_text("qubits 2\nfredkin 0 1\n")
        code, _, err = run(capsys, "simplify", "--in", str(src), "--out", str(tmp_path / "o"))
        assert code == EXIT_CONFIG and "line 2" in err


class TestDistanceCommand:
    def test_key_value_lines(self, capsys):
        code, out, _ = run(capsys, "distance", "--alpha", "0.3", "--p", "0.5")
        assert code == EXIT_OK
        values = dict(
            line.split("=") for line in out.splitlines() if "=" in line and " " not in line
        )
        assert set(values) == {
            "diamond_distance",
            "theta_tilde",
            "min_diamond_distance",
            "frobenius_avg",
            "trace_avg",
            "avg_case",
        }
        ratio = float(values["avg_case"]) / float(values["diamond_distance"])
        assert abs(ratio - 1 / (2 * math.sqrt(2))) < 1e-9

    def test_invalid_p_exits_config(self, capsys):
        code, _, err = run(capsys, "distance", "--alpha", "0.3", "--p", "1.5")
        assert code == EXIT_CONFIG


class TestOptimizeCommand:
    def test_plan_summary(self, tmp_path, capsys):
        src = tmp_path / "q.circ"
        src.write_text(serialize(qft(6)))
        code, out, _ = run(
            capsys, "optimize", "--in", str(src), "--epsilon", "0.1", "--p", "0.75",
            "--shots", "64", "--seed", "5",
        )
        assert code == EXIT_OK
        values = dict(line.split("=") for line in out.splitlines() if "=" in line)
        assert int(values["baseline_2q"]) == 30
        assert int(values["n_accepted"]) > 0
        assert float(values["spent_budget"]) <= 0.1

    def test_squash_mode(self, tmp_path, capsys):
        src = tmp_path / "q.circ"
        src.write_text(serialize(qft(8)))
        code, out, _ = run(
            capsys, "optimize", "--in", str(src), "--epsilon", "0.01", "--squash",
            "--shots", "4",
        )
        assert code == EXIT_OK
        values = dict(line.split("=") for line in out.splitlines() if "=" in line)
        assert float(values["stderr_2q"]) == 0.0

    def test_p_one_needs_squash_flag(self, tmp_path, capsys):
        src = tmp_path / "q.circ"
        src.write_text(serialize(qft(4)))
        code, _, err = run(capsys, "optimize", "--in", str(src), "--epsilon", "0.1", "--p", "1.0")
        assert code == EXIT_CONFIG


class TestVerifyCommand:
    def test_cap_exceeded_exit(self, tmp_path, capsys):
        src = tmp_path / "q.circ"
        src.write_text(serialize(qft(6)))
        code, _, err = run(
            capsys, "verify", "--in", str(src), "--epsilon", "0.05", "--p", "0.5",
            "--mode", "bounds",
        )
        assert code == EXIT_CAP

    def test_avgcase_mode(self, tmp_path, capsys):
        src = tmp_path / "z.circ"
        src.write_text(serialize(Circuit(2, (zphase(0, 0.2), zphase(1, -0.3)))))
        code, out, _ = run(
            capsys, "verify", "--in", str(src), "--epsilon", "0.5", "--p", "0.5",
            "--mode", "avgcase",
        )
        assert code == EXIT_OK and "avg_case=" in out


class TestSweepCommand:
    def test_csv_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code, _, _ = run(
            capsys, "sweep", "--circuit", "qft", "--qubits", "4",
            "--epsilons", "0.05,0.1", "--ps", "0,0.5,1.0",
            "--shots", "8", "--seed", "3", "--out", str(out),
        )
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 2 * 3
        header = lines[0].split(",")
        assert header[:5] == ["circuit", "L", "epsilon", "p", "realization"]
        manifest = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
        assert manifest["master_seed"] == 3
        assert manifest["command"] == "sweep"
        for line in lines[1:]:
            fields = dict(zip(header, line.split(",")))
            assert float(fields["spent_budget"]) <= float(fields["epsilon"]) + 1e-12

    def test_rerun_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = [
            "sweep", "--circuit", "rqc", "--qubits", "4", "--depth", "40",
            "--epsilons", "0.05", "--ps", "0.5,1.0", "--shots", "16",
            "--realizations", "2", "--seed", "11",
        ]
        run(capsys, *args, "--out", str(a))
        run(capsys, *args, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_bad_grid_is_config_error(self, tmp_path, capsys):
        code, _, _ = run(
            capsys, "sweep", "--circuit", "qft", "--qubits", "3",
            "--epsilons", "abc", "--ps", "0.5", "--out", str(tmp_path / "x.csv"),
        )
        assert code == EXIT_CONFIG

    def test_p_out_of_range_is_config_error(self, tmp_path, capsys):
        code, _, _ = run(
            capsys, "sweep", "--circuit", "qft", "--qubits", "3",
            "--epsilons", "0.05", "--ps", "1.5", "--out", str(tmp_path / "x.csv"),
        )
        assert code == EXIT_CONFIG
