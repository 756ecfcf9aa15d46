"""Command-line interface."""

import csv
import io
import json

import pytest

from bootperc import cli


def invoke(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def payload(text):
    doc = json.loads(text)
    assert set(doc) == {"invocation", "run_config", "result"}
    return doc


@pytest.fixture
def spanned_file(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("4 4\n1000\n0100\n0010\n0001\n")
    return path


class TestCommands:
    def test_integrals(self, capsys):
        code, out, _ = invoke(capsys, "integrals", "--which", "g")
        assert code == 0
        res = payload(out)["result"]["g"]
        assert abs(res["deviation"]) < 1e-8

    def test_curves_csv(self, capsys):
        code, out, _ = invoke(capsys, "curves", "--points", "5", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("# bootperc curves")
        assert lines[1].startswith("# run_config {")
        rows = list(csv.DictReader(io.StringIO("\n".join(lines[2:]))))
        assert len(rows) == 5 and set(rows[0]) == {"z", "f", "g", "beta"}

    def test_traverse_bracket(self, capsys):
        code, out, _ = invoke(capsys, "traverse", "--dims", "6x3", "--p", "0.2")
        res = payload(out)["result"]
        assert code == 0 and res["lower"] <= res["probability"] <= res["upper"]

    def test_simulate_I_deterministic(self, capsys):
        args = ("simulate-I", "--L", "3", "--p", "0.4", "--trials", "300", "--seed", "9")
        _, a, _ = invoke(capsys, *args, "--workers", "1")
        _, b, _ = invoke(capsys, *args, "--workers", "2")
        ra, rb = payload(a)["result"], payload(b)["result"]
        assert ra == rb and ra["master_seed"] == 9

    def test_simulate_J(self, capsys):
        code, out, _ = invoke(capsys, "simulate-J", "--t", "0", "--p", "0.3", "--trials", "200")
        assert code == 0 and 0 <= payload(out)["result"]["mean"] <= 1

    def test_event_A(self, capsys):
        code, out, _ = invoke(capsys, "event-A", "--m", "6", "--p", "0.5", "--trials", "200")
        res = payload(out)["result"]
        assert code == 0 and res["violations"] == 0 and res["r"] == 1

    def test_scan(self, capsys):
        code, out, _ = invoke(capsys, "scan", "--L", "4,8", "--points", "11", "--trials", "50")
        res = payload(out)["result"]
        assert code == 0 and set(res["p_half"]) == {"4", "8"}
        assert len(res["rows"]) == 22

    def test_merge_tree(self, capsys, spanned_file):
        code, out, _ = invoke(capsys, "merge-tree", "--input", str(spanned_file))
        assert code == 0 and "nodes" in json.dumps(payload(out)["result"])

    def test_hierarchy(self, capsys, spanned_file):
        code, out, _ = invoke(capsys, "hierarchy", "--input", str(spanned_file))
        res = payload(out)["result"]
        assert code == 0 and res["good"] and res["problems"] == []

    def test_variational(self, capsys):
        code, out, _ = invoke(capsys, "variational", "--a", "0.2,0.3", "--b", "1,1.5", "--grid-steps", "32")
        res = payload(out)["result"]
        assert code == 0 and 0 < res["W"] <= res["axis_bound"] + res["eps_grid"]

    def test_verify(self, capsys):
        code, out, _ = invoke(capsys, "verify", "--property", "prop30", "--dims", "3x3")
        res = payload(out)["result"]
        assert code == 0 and res["counterexamples"] == []

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "o.json"
        code, out, _ = invoke(capsys, "integrals", "--which", "f", "--out", str(target))
        assert code == 0 and out == ""
        assert "f" in payload(target.read_text())["result"]


class TestErrors:
    def test_unknown_command(self, capsys):
        assert invoke(capsys, "nope")[0] == 2

    def test_bad_probability(self, capsys):
        assert invoke(capsys, "simulate-I", "--L", "3", "--p", "1.5")[0] == 2

    def test_bad_dims(self, capsys):
        assert invoke(capsys, "verify", "--property", "prop30", "--dims", "3by3")[0] == 2

    def test_missing_input(self, capsys, tmp_path):
        code, _, err = invoke(capsys, "merge-tree", "--input", str(tmp_path / "missing.txt"))
        assert code == 2 and "cannot read" in err

    def test_malformed_configuration(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 3\n101\n")
        assert invoke(capsys, "merge-tree", "--input", str(path))[0] == 2

    def test_budget(self, capsys):
        assert invoke(capsys, "verify", "--property", "prop30", "--dims", "5x5")[0] == 2


class TestConfigFile:
    def test_values_and_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# shared settings\nL = 2\np = 0.5\ntrials = 100\nseed = 3\n")
        code, out, _ = invoke(capsys, "simulate-I", "--config", str(cfg))
        doc = payload(out)
        assert code == 0 and doc["run_config"]["trials"] == 100
        code, out, _ = invoke(capsys, "simulate-I", "--config", str(cfg), "--trials", "50")
        assert payload(out)["run_config"]["trials"] == 50

    def test_bad_line(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("just words\n")
        assert invoke(capsys, "simulate-I", "--config", str(cfg))[0] == 2
