import json
import math
import os

import pytest

from brjuno.cli import main

GOLD_TOKEN = "(−1+1*sqrt(5))/2"

# frozen oracle, mpmath 40 dps: ln(1/g)/(1-g) at the golden mean
B_GOLDEN = 1.25982891379441021985842991132


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestCf:
    def test_golden_period(self, capsys):
        code, doc = run_json(capsys, [
            "cf", "--x", GOLD_TOKEN, "--alpha", "1", "--depth", "40",
            "--format", "json"])
        assert code == 0
        assert doc["period"] == [0, 1]
        assert set(doc["digits"][1:]) == {1}
        assert doc["truncated"] is False

    def test_rational_terminates(self, capsys):
        code, doc = run_json(capsys, ["cf", "--x", "2/7"])
        assert code == 0
        assert doc["terminated_at"] == 2
        assert doc["p"][-1] == 2 and doc["q"][-1] == 7

    def test_csv_preamble_and_rows(self, tmp_path):
        out = tmp_path / "cf.csv"
        code = main(["cf", "--x", "2/7", "--format", "csv", "--out", str(out)])
        assert code == 0
        text = out.read_bytes().decode()
        lines = text.split("\r\n")
        assert lines[0].startswith("# tool: brjuno ")
        assert "# command: cf" in lines
        header_idx = next(i for i, l in enumerate(lines) if not l.startswith("#"))
        assert lines[header_idx] == "n,a,eps,p,q,x_n,beta,precision_bits"
        assert len([l for l in lines[header_idx + 1:] if l]) == 3

    def test_determinism(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert main(["cf", "--x", GOLD_TOKEN, "--depth", "30",
                         "--format", "csv", "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_x(self, capsys):
        assert main(["cf"]) == 2
        assert "--x" in capsys.readouterr().err


class TestBrjuno:
    def test_golden_value_and_tail(self, capsys):
        code, doc = run_json(capsys, [
            "brjuno", "--x", GOLD_TOKEN, "--depth", "60"])
        assert code == 0
        assert abs(doc["value"] - 1.259830) < 1e-5
        assert abs(doc["value"] - B_GOLDEN) < 1e-12
        assert doc["tail_bound"] < 1e-12

    def test_folded_variant(self, capsys):
        code, doc = run_json(capsys, [
            "brjuno", "--x", GOLD_TOKEN, "--alpha", "1/2"])
        assert code == 0
        g = (math.sqrt(5) - 1) / 2
        assert abs(doc["value"] - 2 * math.log(1 / g) / (1 - g * g)) < 1e-10

    def test_rational_divergence_flag(self, capsys):
        code, doc = run_json(capsys, ["brjuno", "--x", "3/7"])
        assert code == 0
        assert doc["diverged"] is True
        assert doc["value"] == "inf"

    def test_env_precision(self, capsys, monkeypatch):
        monkeypatch.setenv("BRJUNO_PRECISION", "200")
        code, doc = run_json(capsys, ["brjuno", "--x", GOLD_TOKEN])
        assert code == 0
        assert doc["meta"]["precision_bits"] == 200

    def test_bad_env_precision(self, capsys, monkeypatch):
        monkeypatch.setenv("BRJUNO_PRECISION", "lots")
        assert main(["brjuno", "--x", GOLD_TOKEN]) == 2
        assert "BRJUNO_PRECISION" in capsys.readouterr().err


class TestWeights:
    def test_power_weight_closed_form(self, capsys):
        code, doc = run_json(capsys, [
            "bseries", "--x", GOLD_TOKEN, "--f", "power:1/2"])
        assert code == 0
        g = (math.sqrt(5) - 1) / 2
        assert abs(doc["value"] - g ** -0.5 / (1 - g)) < 1e-10

    def test_unknown_weight(self, capsys):
        assert main(["bseries", "--x", GOLD_TOKEN, "--f", "cosh"]) == 2
        assert "weight" in capsys.readouterr().err


class TestDioph:
    def test_golden_constant_type(self, capsys):
        code, doc = run_json(capsys, ["dioph", "--x", GOLD_TOKEN, "--depth", "30"])
        assert code == 0
        assert doc["tau_hat"] < 0.01
        assert doc["points"] >= 10


class TestOperator:
    def test_neumann_summary(self, capsys):
        code, doc = run_json(capsys, ["operator", "--n", "256"])
        assert code == 0
        assert doc["terms"] > 10
        assert 0.0 < doc["term_ratios"][-1] < 0.47
        assert doc["sup"] > 1.0

    def test_contraction_report(self, capsys):
        code, doc = run_json(capsys, [
            "operator", "--n", "128", "--action", "contraction",
            "--gamma", "0.4"])
        assert code == 0
        assert doc["ok"] is True
        assert doc["lhs"] <= doc["rhs"]

    def test_bmo(self, capsys):
        code, doc = run_json(capsys, [
            "operator", "--n", "128", "--action", "bmo"])
        assert code == 0
        assert 0.0 < doc["bmo_seminorm"] < 10.0


class TestComplex:
    def test_golden_point(self, capsys):
        code, doc = run_json(capsys, [
            "complex", "--x", GOLD_TOKEN, "--eps", "1e-3",
            "--q-max", "60", "--n-max", "512"])
        assert code == 0
        assert doc["unreliable"] is False
        assert abs(doc["im"] - B_GOLDEN) < 0.1

    def test_unreliable_exit_code(self, capsys):
        code = main(["complex", "--x", "0.47", "--eps", "1e-4",
                     "--q-max", "96", "--n-max", "512"])
        assert code == 3

    def test_slit_rejected(self, capsys):
        assert main(["complex", "--x", "0.5", "--eps", "-1.0"]) == 2


class TestScan:
    def test_half_jump_row(self, capsys):
        code = main(["scan", "--x0", "0.42", "--x1", "0.58", "--eps", "1e-3",
                     "--samples", "5", "--q-max", "60", "--n-max", "512",
                     "--jump-q-max", "2", "--jump-delta", "1e-2"])
        doc = json.loads(capsys.readouterr().out)
        assert code in (0, 3)
        assert len(doc["rows"]) == 5
        assert [(j["p"], j["q"]) for j in doc["jumps"]] == [(1, 2)]
        assert abs(doc["jumps"][0]["expected"] - math.pi / 2) < 1e-12


class TestLindstedt:
    def test_csv_table(self, tmp_path):
        out = tmp_path / "l.csv"
        code = main(["lindstedt", "--rho", GOLD_TOKEN, "--order", "12",
                     "--format", "csv", "--out", str(out)])
        assert code == 0
        lines = [l for l in out.read_bytes().decode().split("\r\n") if l]
        body = [l for l in lines if not l.startswith("#")]
        assert body[0] == "n,coeff_mag,radius_estimate,precision_bits"
        assert len(body) == 13
        assert body[1].startswith("1,0.0229017201096543")

    def test_json_summary_keys(self, capsys):
        code, doc = run_json(capsys, [
            "lindstedt", "--rho", GOLD_TOKEN, "--order", "30"])
        assert code == 0
        for key in ("rho", "order", "k_hat", "two_B", "delta"):
            assert key in doc
        assert abs(doc["two_B"] - 2 * B_GOLDEN) < 1e-8
        assert -2.7 < doc["delta"] < -2.35

    def test_estimate_off(self, capsys):
        code, doc = run_json(capsys, [
            "lindstedt", "--rho", GOLD_TOKEN, "--order", "12",
            "--estimate", "no"])
        assert code == 0
        assert doc["k_hat"] is None and doc["estimate_skipped"] is True

    def test_rational_rho_exit_2(self, capsys):
        assert main(["lindstedt", "--rho", "3/7", "--order", "20"]) == 2
        assert "divisor" in capsys.readouterr().err

    def test_standard_map(self, capsys):
        code, doc = run_json(capsys, [
            "lindstedt", "--rho", GOLD_TOKEN, "--order", "8",
            "--map", "standard"])
        assert code == 0
        assert len(doc["radius_estimates"]) == 8
        assert doc["estimate_skipped"] is True


class TestCompare:
    def test_metallic_set(self, capsys):
        code, doc = run_json(capsys, [
            "compare", "--set", "metallic:3", "--order", "20"])
        assert code == 0
        assert len(doc["rows"]) == 3
        for row in doc["rows"]:
            assert row["delta"] is not None
            assert math.isfinite(row["delta"])
        assert doc["rows"][0]["rho"] == "(-1+sqrt(5))/2"

    def test_explicit_rhos(self, capsys):
        code, doc = run_json(capsys, [
            "compare", "--rhos", "(-1+sqrt(5))/2,-1+sqrt(2)",
            "--order", "20"])
        assert code == 0
        assert len(doc["rows"]) == 2

    def test_needs_input(self, capsys):
        assert main(["compare", "--order", "20"]) == 2


class TestSweep:
    def test_empty_grid(self, capsys, tmp_path):
        out = tmp_path / "empty"
        code = main(["sweep", "--command", "brjuno", "--variable", "alpha",
                     "--values", "", "--out-dir", str(out)])
        assert code == 0
        assert not out.exists()

    def test_alpha_sweep_aggregate(self, capsys, tmp_path):
        out = tmp_path / "sw"
        code = main(["sweep", "--command", "brjuno", "--variable", "alpha",
                     "--values", "1/2,0.618,0.75,1", "--out-dir", str(out),
                     "--workers", "1", "--",
                     "--x", GOLD_TOKEN, "--depth", "40"])
        assert code == 0
        files = sorted(os.listdir(out))
        assert files == ["aggregate.csv", "brjuno_alpha_000.json",
                         "brjuno_alpha_001.json", "brjuno_alpha_002.json",
                         "brjuno_alpha_003.json"]
        body = [l for l in (out / "aggregate.csv").read_bytes().decode().split("\r\n")
                if l and not l.startswith("#")]
        assert body[0].startswith("alpha,")
        assert len(body) == 5
        # bounded-difference property across windows
        vals = []
        for name in files[1:]:
            doc = json.loads((out / name).read_text())
            vals.append(doc["value"])
        assert max(vals) - min(vals) < 5.0

    def test_parallel_matches_serial(self, capsys, tmp_path):
        outs = []
        for tag, workers in (("s", "1"), ("p", "3")):
            out = tmp_path / tag
            code = main(["sweep", "--command", "brjuno", "--variable", "x",
                         "--set", "metallic:3", "--out-dir", str(out),
                         "--workers", workers, "--", "--depth", "30"])
            assert code == 0
            outs.append(out)
        for name in sorted(os.listdir(outs[0])):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

    def test_grid_values(self, capsys, tmp_path):
        out = tmp_path / "g"
        code = main(["sweep", "--command", "cf", "--variable", "x",
                     "--grid", "0.21:0.29:3", "--out-dir", str(out),
                     "--workers", "1", "--format", "csv"])
        assert code == 0
        assert len([f for f in os.listdir(out) if f.endswith(".csv")]) == 4

    def test_variable_not_on_command(self, capsys, tmp_path):
        code = main(["sweep", "--command", "brjuno", "--variable", "gamma",
                     "--values", "0.3", "--out-dir", str(tmp_path / "x")])
        assert code == 2

    def test_child_domain_error_rolls_up(self, capsys, tmp_path):
        out = tmp_path / "bad"
        code = main(["sweep", "--command", "lindstedt", "--variable", "rho",
                     "--values", "3/7", "--out-dir", str(out),
                     "--workers", "1", "--", "--order", "20"])
        assert code == 2
        doc = json.loads((out / "lindstedt_rho_000.json").read_text())
        assert "divisor" in doc["error"]
