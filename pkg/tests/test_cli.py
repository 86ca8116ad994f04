"""End-to-end command-line behavior via main(argv)."""

import json

import pytest

from relinopt import RelinPlan, save_circuit, save_plan
from relinopt.cli import main
from relinopt.examples import demo_circuit, squaring_chain, two_level_chain


@pytest.fixture
def demo_path(tmp_path):
    path = tmp_path / "demo.json"
    save_circuit(demo_circuit(), path, semantics="standard")
    return str(path)


@pytest.fixture
def chain_path(tmp_path):
    path = tmp_path / "chain.json"
    save_circuit(two_level_chain(), path, semantics="standard")
    return str(path)


@pytest.fixture
def knapsack_path(tmp_path):
    path = tmp_path / "knap.json"
    path.write_text(
        '{"values": [1, 2], "weights": [2, 3], "capacity": 4}\n', encoding="utf-8"
    )
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidate:
    def test_ok(self, capsys, demo_path):
        code, out, err = run(capsys, "validate", demo_path)
        assert code == 0
        assert out.startswith("ok: 12 vertices, semantics standard")

    def test_strict_violations_exit_one(self, capsys, demo_path):
        code, out, err = run(capsys, "validate", demo_path, "--strict")
        assert code == 1
        assert "u: mul-outdegree" in out
        assert "invalid:" in out

    def test_missing_file(self, capsys):
        code, out, err = run(capsys, "validate", "/nonexistent/c.json")
        assert code == 1 and err.startswith("error:")

    def test_malformed_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops", encoding="utf-8")
        code, out, err = run(capsys, "validate", str(bad))
        assert code == 1 and "not valid JSON" in err


class TestEval:
    def test_zero_plan_payload(self, capsys, demo_path):
        code, out, err = run(capsys, "eval", demo_path)
        assert code == 0
        payload = json.loads(out)
        assert payload["semantics"] == "standard"
        assert payload["cost_mode"] == "objective"
        assert payload["cost"]["total"] == "13"
        assert payload["lengths"]["root"] == 6
        assert payload["plan"] == {"relin": {}}

    def test_plan_and_mode_flags(self, capsys, demo_path, tmp_path):
        plan_path = tmp_path / "plan.json"
        save_plan(RelinPlan({"u": 1, "m": 1, "root": 1}), plan_path)
        code, out, err = run(
            capsys,
            "eval",
            demo_path,
            "--plan",
            str(plan_path),
            "--cost",
            "prose",
            "--kr",
            "5",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["cost"] == {"mul": "12", "relin": "15", "total": "27"}
        assert payload["k_r"] == "5"

    def test_output_file(self, capsys, demo_path, tmp_path):
        target = tmp_path / "result.json"
        code, out, err = run(capsys, "eval", demo_path, "-o", str(target))
        assert code == 0
        assert out == f"wrote {target}\n"
        assert json.loads(target.read_text())["cost"]["total"] == "13"

    def test_infeasible_plan_exits_two(self, capsys, demo_path, tmp_path):
        plan_path = tmp_path / "plan.json"
        save_plan(RelinPlan({"u": 2}), plan_path)
        code, out, err = run(capsys, "eval", demo_path, "--plan", str(plan_path))
        assert code == 2 and "below the minimum" in err

    def test_bad_cost_constant(self, capsys, demo_path):
        code, out, err = run(capsys, "eval", demo_path, "--km", "abc")
        assert code == 1 and "not a valid rational" in err

    def test_byte_determinism(self, capsys, demo_path):
        _, first, _ = run(capsys, "eval", demo_path, "--cost", "prose")
        _, second, _ = run(capsys, "eval", demo_path, "--cost", "prose")
        assert first == second

    def test_semantics_flag_overrides_file(self, capsys, demo_path):
        code, out, err = run(capsys, "eval", demo_path, "--semantics", "reduced")
        payload = json.loads(out)
        assert payload["semantics"] == "reduced"
        assert payload["lengths"]["root"] == 5


class TestSolve:
    def test_baseline(self, capsys, demo_path):
        code, out, err = run(capsys, "solve", demo_path, "--method", "baseline")
        payload = json.loads(out)
        assert code == 0 and payload["method"] == "baseline"
        assert payload["plan"] == {"relin": {"m": 1, "root": 1, "u": 1}}

    def test_brute_with_expensive_relin(self, capsys, demo_path):
        code, out, err = run(
            capsys, "solve", demo_path, "--method", "brute", "--cost", "prose", "--kr", "5"
        )
        payload = json.loads(out)
        assert code == 0
        assert payload["plan"] == {"relin": {}}
        assert payload["cost"]["total"] == "16"

    def test_dp_rejects_fan_out(self, capsys, demo_path):
        code, out, err = run(capsys, "solve", demo_path, "--method", "dp")
        assert code == 1 and "feeds 2 consumers" in err

    def test_dp_matches_brute_on_chain(self, capsys, chain_path):
        code, dp_out, _ = run(capsys, "solve", chain_path, "--method", "dp", "--km", "2")
        code2, brute_out, _ = run(capsys, "solve", chain_path, "--method", "brute", "--km", "2")
        assert code == code2 == 0
        dp_payload, brute_payload = json.loads(dp_out), json.loads(brute_out)
        assert dp_payload["cost"] == brute_payload["cost"]
        assert dp_payload["plan"] == {"relin": {"a": 1}}
        assert dp_payload["cost"]["total"] == "13"

    def test_restricted_requires_marks(self, capsys, demo_path):
        code, out, err = run(capsys, "solve", demo_path, "--method", "restricted")
        assert code == 1 and "requires --marks" in err

    def test_capacity_exit_code(self, capsys, demo_path):
        code, out, err = run(
            capsys, "solve", demo_path, "--method", "brute", "--cap", "3"
        )
        assert code == 3 and "exceed the cap" in err

    def test_default_method_is_dp(self, capsys, chain_path):
        code, out, err = run(capsys, "solve", chain_path)
        assert code == 0 and json.loads(out)["method"] == "dp"


class TestKnapsack:
    def test_solves(self, capsys, knapsack_path):
        code, out, err = run(capsys, "knapsack", knapsack_path)
        assert code == 0
        assert json.loads(out) == {"selection": [0, 1], "value": 2}

    def test_brute_flag_accepted(self, capsys, knapsack_path):
        code, out, err = run(capsys, "knapsack", knapsack_path, "--brute")
        assert code == 0 and json.loads(out)["value"] == 2

    def test_item_cap_exit_three(self, capsys, knapsack_path):
        code, out, err = run(capsys, "knapsack", knapsack_path, "--max-items", "1")
        assert code == 3 and "exceed" in err


class TestReductionPipeline:
    def test_reduce_solve_decode_round_trip(self, capsys, tmp_path):
        knap = tmp_path / "inst.json"
        knap.write_text('{"values": [3], "weights": [1], "capacity": 1}\n', encoding="utf-8")
        circuit_out = tmp_path / "compiled.json"
        marks_out = tmp_path / "marks.json"

        code, out, err = run(
            capsys, "reduce", str(knap), "-o", str(circuit_out), "--marks", str(marks_out)
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["vertices"] == len(json.loads(circuit_out.read_text())["vertices"])
        assert summary["marks"] == json.loads(marks_out.read_text())["marks"]

        result_out = tmp_path / "solved.json"
        code, out, err = run(
            capsys,
            "solve",
            str(circuit_out),
            "--method",
            "restricted",
            "--marks",
            str(marks_out),
            "-o",
            str(result_out),
        )
        assert code == 0
        solved = json.loads(result_out.read_text())
        # the marks file's calibrated price and prose accounting apply
        assert solved["k_r"] == str(summary["params"]["k_r"])
        assert solved["cost_mode"] == "prose"
        assert solved["semantics"] == "reduced"

        code, out, err = run(
            capsys, "decode", "--marks", str(marks_out), "--result", str(result_out)
        )
        assert code == 0
        decoded = json.loads(out)

        code, out, err = run(capsys, "knapsack", str(knap))
        oracle = json.loads(out)
        assert decoded["value"] == oracle["value"]
        assert decoded["selection"] == oracle["selection"]

    def test_decode_missing_result_file(self, capsys, tmp_path, knapsack_path):
        circuit_out = tmp_path / "c.json"
        marks_out = tmp_path / "m.json"
        run(capsys, "reduce", knapsack_path, "-o", str(circuit_out), "--marks", str(marks_out))
        code, out, err = run(
            capsys, "decode", "--marks", str(marks_out), "--result", str(tmp_path / "no.json")
        )
        assert code == 1 and err.startswith("error:")


class TestExports:
    def test_dot_stdout(self, capsys, demo_path):
        code, out, err = run(capsys, "export-dot", demo_path)
        assert code == 0
        assert out.startswith("digraph") and '"m" -> "root"' in out

    def test_dot_with_plan_lengths(self, capsys, demo_path, tmp_path):
        plan_path = tmp_path / "plan.json"
        save_plan(RelinPlan({"u": 1}), plan_path)
        code, out, err = run(capsys, "export-dot", demo_path, "--plan", str(plan_path))
        assert code == 0 and "l=4" in out  # root shortened by the upstream relin

    def test_lp_stdout(self, capsys, demo_path):
        code, out, err = run(capsys, "export-lp", demo_path)
        assert code == 0
        assert "Minimize" in out and "prod_root: l_root + x_root - l_m - l_s = -1" in out

    def test_lp_reduced_semantics_flag(self, capsys, demo_path):
        code, out, err = run(capsys, "export-lp", demo_path, "--semantics", "reduced")
        assert code == 0 and "prod_root: l_root + x_root - l_m - l_s = 0" in out


class TestTopLevel:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "relinopt" in capsys.readouterr().out

    def test_seed_flag_is_accepted(self, capsys, demo_path):
        code, out, err = run(capsys, "--seed", "7", "validate", demo_path)
        assert code == 0

    def test_unknown_command(self, capsys):
        code, out, err = run(capsys, "frobnicate")
        assert code == 1 and err.startswith("error:")

    def test_missing_command(self, capsys):
        code, out, err = run(capsys)
        assert code == 1 and err.startswith("error:")

    def test_packaged_demo_circuit(self, capsys):
        from importlib import resources

        with resources.as_file(
            resources.files("relinopt").joinpath("data/demo_circuit.json")
        ) as path:
            code, out, err = run(capsys, "validate", str(path))
        assert code == 0 and "12 vertices" in out
