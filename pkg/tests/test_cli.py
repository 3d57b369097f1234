import json

import pytest

from revca.classifier import OracleMismatchError, classify
from revca.cli import main
from revca.rulespace import RuleParams, rule_from_decimal


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestClassify:
    def test_eca75_json(self, capsys):
        code, out, _ = run(
            capsys,
            "classify", "--states", "2", "--neighborhood", "3", "--rule", "75",
            "--format", "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["class"] == "NonTriviallySemiReversible"
        assert payload["tree"] == {"unique_nodes": 21, "height": 5}
        assert payload["expressions"] == [{"residue": 0, "modulus": 2, "min_n": 2}]

    def test_eca75_text(self, capsys):
        code, out, _ = run(
            capsys, "classify", "--states", "2", "--neighborhood", "3", "--rule", "75"
        )
        assert code == 0
        assert "unique nodes (M): 21" in out
        assert "tree height: 5" in out
        assert "n ≡ 0 (mod 2), n ≥ 2" in out

    def test_strictly_irreversible_4_neighbor(self, capsys):
        code, out, _ = run(
            capsys,
            "classify", "--states", "2", "--neighborhood", "4",
            "--rule", "0000111101001110", "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["class"] == "StrictlyIrreversible"

    def test_constant_rule(self, capsys):
        code, out, _ = run(
            capsys,
            "classify", "--states", "2", "--neighborhood", "3",
            "--rule", "00000000", "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["class"] == "StrictlyIrreversible"

    def test_bad_rule_exits_1(self, capsys):
        code, _, err = run(
            capsys, "classify", "--states", "3", "--neighborhood", "3", "--rule", "012"
        )
        assert code == 1
        assert "length 3" in err

    def test_usage_error_exits_1(self, capsys):
        code, _, err = run(capsys, "classify", "--states", "2")
        assert code == 1

    def test_deterministic_output(self, capsys):
        args = ("classify", "--states", "2", "--neighborhood", "3", "--rule", "105",
                "--format", "json")
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second


class TestCheckAndOracle:
    def test_check_reversible(self, capsys):
        code, out, _ = run(
            capsys,
            "check", "--states", "2", "--neighborhood", "4",
            "--rule", "1010101010101010", "--n", "5", "--format", "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload == {"n": 5, "classifier": True, "oracle": True, "agree": True}

    def test_oracle_pairgraph_large_odd(self, capsys):
        code, out, _ = run(
            capsys,
            "oracle", "--states", "2", "--neighborhood", "3", "--rule", "75",
            "--n", "101", "--method", "pairgraph",
        )
        assert code == 0
        assert out.strip() == "reversible"

    def test_oracle_bruteforce(self, capsys):
        code, out, _ = run(
            capsys,
            "oracle", "--states", "2", "--neighborhood", "3", "--rule", "75",
            "--n", "4", "--method", "bruteforce", "--format", "json",
        )
        assert code == 0
        assert json.loads(out) == {"n": 4, "method": "bruteforce", "reversible": False}


class TestEnumerate:
    def test_eca_histogram(self, capsys):
        code, out, _ = run(
            capsys,
            "enumerate", "--states", "2", "--neighborhood", "3", "--format", "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["histogram"]["Reversible"] == 6
        assert payload["histogram"]["StrictlyIrreversible"] == 128
        assert payload["histogram"]["SemiReversible"] == 122
        assert payload["count"] == 256
        assert [row["decimal"] for row in payload["rules"]] == list(range(256))

    def test_filter_reversible(self, capsys):
        code, out, _ = run(
            capsys,
            "enumerate", "--states", "2", "--neighborhood", "3",
            "--filter", "Reversible", "--format", "json",
        )
        payload = json.loads(out)
        assert [row["decimal"] for row in payload["rules"]] == [15, 51, 85, 170, 204, 240]

    def test_group_equivalents(self, capsys):
        code, out, _ = run(
            capsys,
            "enumerate", "--states", "2", "--neighborhood", "3",
            "--filter", "NonTriviallySemiReversible", "--group-equivalents",
            "--format", "json",
        )
        payload = json.loads(out)
        minimals = {row["minimal"] for row in payload["rules"]}
        assert minimals == {45, 105, 150, 154}

    def test_budget_guard(self, capsys):
        code, _, err = run(capsys, "enumerate", "--states", "2", "--neighborhood", "4")
        assert code == 1
        assert "--long" in err

    def test_hard_cap(self, capsys):
        code, _, err = run(
            capsys, "enumerate", "--states", "3", "--neighborhood", "3", "--long"
        )
        assert code == 1
        assert "cap" in err

    def test_small_family_agrees_with_bruteforce(self, capsys):
        from revca.dynamics import brute_force_reversible
        from revca.classifier import is_reversible_for

        code, out, _ = run(
            capsys,
            "enumerate", "--states", "2", "--neighborhood", "2", "--format", "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["count"] == 16
        params = RuleParams(2, 2)
        for row in payload["rules"]:
            rule = rule_from_decimal(row["decimal"], params)
            c = classify(rule, verified_up_to=0)
            assert c.ca_class.value == row["class"]
            for n in range(1, 11):
                assert is_reversible_for(c, n) == brute_force_reversible(rule, n)


class TestExport:
    def test_transition_diagram(self, capsys):
        code, out, _ = run(
            capsys,
            "export", "--states", "3", "--neighborhood", "3",
            "--rule", "222211112001000000110122221",
            "--target", "transition-diagram", "--n", "3",
        )
        assert code == 0
        assert out.count("->") == 27

    def test_transition_diagram_needs_n(self, capsys):
        code, _, err = run(
            capsys,
            "export", "--states", "2", "--neighborhood", "3", "--rule", "75",
            "--target", "transition-diagram",
        )
        assert code == 1
        assert "--n" in err

    def test_debruijn(self, capsys):
        code, out, _ = run(
            capsys,
            "export", "--states", "2", "--neighborhood", "3", "--rule", "75",
            "--target", "debruijn",
        )
        assert code == 0
        assert out.count("->") == 8

    def test_minimized_tree_to_file(self, capsys, tmp_path):
        target = tmp_path / "tree.dot"
        code, out, _ = run(
            capsys,
            "export", "--states", "2", "--neighborhood", "3", "--rule", "75",
            "--target", "minimized-tree", "--output", str(target),
        )
        assert code == 0
        assert out == ""
        assert "digraph" in target.read_text()


class TestExitCodes:
    def test_oracle_mismatch_maps_to_2(self, capsys, monkeypatch):
        import revca.cli as cli

        def explode(rule, verified_up_to=24):
            raise OracleMismatchError(rule, [True, False], [True, True])

        monkeypatch.setattr(cli, "classify", explode)
        code, _, err = run(
            capsys, "classify", "--states", "2", "--neighborhood", "3", "--rule", "75"
        )
        assert code == 2
        assert "ORACLE MISMATCH" in err
        assert "disagree" in err

    def test_left_radius_flag(self, capsys):
        code, out, _ = run(
            capsys,
            "classify", "--states", "2", "--neighborhood", "3", "--rule", "75",
            "--left-radius", "0", "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["class"] == "NonTriviallySemiReversible"
