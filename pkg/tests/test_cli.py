"""Command-line client: files in, JSON out, exit-code contract."""
from __future__ import annotations

import json

from shiftlab.cli import main

FORK = {"vertices": ["0", "1", "2", "3"], "parent": {"0": "0", "1": "0", "2": "1", "3": "1"}}
CYCLE = {"vertices": ["a", "b"], "parent": {"a": "b", "b": "a"}}
ISOMETRY = {
    "forest": {"vertices": ["x"], "parent": {"x": "x"}},
    "weights": {"sq": {"x": 0}, "tails": {"x": {"prefix_sq": [], "constant_sq": 1}}},
}
CE_TREE = {
    "vertices": ["r", "v1", "v2", "c2"],
    "parent": {"r": "r", "v1": "r", "v2": "v1", "c2": "v1"},
}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestForestCommands:
    def test_power(self, tmp_path, capsys):
        f = write(tmp_path, "f.json", FORK)
        code, body = run(capsys, ["forest", "power", f, "-k", "2"])
        assert code == 0 and body["roots"] == ["0", "1"]

    def test_validate_cycle_exits_2(self, tmp_path, capsys):
        f = write(tmp_path, "c.json", CYCLE)
        code, body = run(capsys, ["forest", "validate", f])
        assert code == 2 and body["error"] == "CycleError"

    def test_rooted_sum(self, tmp_path, capsys):
        point = write(tmp_path, "p.json", {"vertices": ["x"], "parent": {"x": "x"}})
        code, body = run(capsys, ["forest", "rooted-sum", point, point])
        assert code == 0 and len(body["forest"]["vertices"]) == 3

    def test_backward(self, tmp_path, capsys):
        f = write(tmp_path, "f.json", FORK)
        code, body = run(capsys, ["forest", "backward", f, "-k", "1"])
        assert code == 0 and len(body["forest"]["vertices"]) == 5

    def test_classify(self, tmp_path, capsys):
        f = write(tmp_path, "f.json", FORK)
        code, body = run(capsys, ["forest", "classify", f, "--tailed", "2", "3"])
        assert code == 0 and body["kind"] == "not-forkless"

    def test_out_file(self, tmp_path, capsys):
        f = write(tmp_path, "f.json", FORK)
        dest = tmp_path / "out.json"
        code, body = run(capsys, ["forest", "validate", f, "--out", str(dest)])
        assert code == 0
        assert json.loads(dest.read_text()) == body


class TestCheckCommand:
    def test_subnormal_holds_exit_0(self, tmp_path, capsys):
        s = write(tmp_path, "s.json", ISOMETRY)
        code, body = run(capsys, ["check", s, "--property", "subnormal"])
        assert code == 0 and body["status"] == "holds"

    def test_counterexample_fails_exit_3(self, tmp_path, capsys):
        tree = write(tmp_path, "t.json", CE_TREE)
        code, ce = run(capsys, ["counterexample", tree])
        assert code == 0
        shift = write(tmp_path, "ce.json", ce["shift"])
        code, body = run(
            capsys, ["check", shift, "--property", "power-hyponormal", "--kmax", "2"]
        )
        assert code == 3
        assert body["witness"] == "r"
        assert body["reports"][1]["hip"]["r"] == "10/9"

    def test_leaf_obstruction_exit_2(self, tmp_path, capsys):
        leafy = {
            "forest": {"vertices": ["a", "b"], "parent": {"a": "a", "b": "a"}},
            "weights": {"sq": {"a": 0, "b": 1}, "tails": {}},
            "allow_leaves": True,
        }
        s = write(tmp_path, "s.json", leafy)
        code, body = run(capsys, ["check", s, "--property", "hyponormal"])
        assert code == 2 and body["status"] == "obstruction"


class TestExtendCommands:
    def test_single(self, tmp_path, capsys):
        s = write(tmp_path, "s.json", ISOMETRY)
        code, body = run(capsys, ["extend", "single", s, "-k", "2"])
        assert code == 0 and body["plan"]["edge_sq"] == ["1/1", "1/1"]

    def test_rooted_sum_halves(self, tmp_path, capsys):
        s = write(tmp_path, "s.json", ISOMETRY)
        code, body = run(capsys, ["extend", "rooted-sum", s, s, "-k", "0"])
        assert code == 0 and body["theta_sq"] == ["1/2", "1/2"]

    def test_infeasible_exit_4(self, tmp_path, capsys):
        blocked = {
            "forest": {"vertices": ["r", "u"], "parent": {"r": "r", "u": "r"}},
            "weights": {
                "sq": {"r": 0, "u": 1},
                "tails": {"u": {"prefix_sq": [], "constant_sq": 2}},
            },
        }
        s = write(tmp_path, "s.json", blocked)
        code, body = run(capsys, ["extend", "rooted-sum", s, "-k", "0"])
        assert code == 4 and body["status"] == "infeasible" and body["witness"] == 0

    def test_join_depth(self, tmp_path, capsys):
        s = write(tmp_path, "s.json", ISOMETRY)
        env = write(
            tmp_path,
            "env.json",
            {
                "vertices": ["e0", "e1", "e2", "e3"],
                "parent": {"e0": "e0", "e1": "e0", "e2": "e1", "e3": "e1"},
            },
        )
        code, body = run(capsys, ["extend", "join-depth", s, s, "--envelope", env, "-k", "2"])
        assert code == 0 and body["frontier"] == ["e2", "e3"]

    def test_powerhypo(self, tmp_path, capsys):
        s = write(tmp_path, "s.json", ISOMETRY)
        code, body = run(
            capsys, ["extend", "powerhypo", s, s, "--ext-sq", "1,1", "--kmax", "3"]
        )
        assert code == 0 and body["root_sq"] == ["1/4", "1/8"]


class TestCounterexampleCommand:
    def test_minimal_tree(self, tmp_path, capsys):
        tree = write(tmp_path, "t.json", CE_TREE)
        code, body = run(capsys, ["counterexample", tree])
        assert code == 0
        assert body["verification"]["hip_2_at_v0"] == "10/9"

    def test_sibling_arm(self, tmp_path, capsys):
        doc = {
            "vertices": ["r", "v1", "s", "v2", "c2"],
            "parent": {"r": "r", "v1": "r", "s": "r", "v2": "v1", "c2": "v1"},
        }
        tree = write(tmp_path, "t.json", doc)
        code, body = run(capsys, ["counterexample", tree])
        assert code == 0 and body["verification"]["hip_2_at_v0"] == "19/18"

    def test_forkless_exit_4(self, tmp_path, capsys):
        chain = write(tmp_path, "c.json", {"vertices": ["a", "b"], "parent": {"a": "a", "b": "a"}})
        code, body = run(capsys, ["counterexample", chain])
        assert code == 4 and body["status"] == "infeasible"

    def test_generate_seeded(self, tmp_path, capsys):
        code_a, body_a = run(capsys, ["counterexample", "--generate", "9", "--seed", "5"])
        code_b, body_b = run(capsys, ["counterexample", "--generate", "9", "--seed", "5"])
        assert code_a == code_b == 0
        assert body_a == body_b


class TestGaugeCommand:
    def test_exact(self, tmp_path, capsys):
        forest = write(tmp_path, "f.json", {"vertices": ["a", "b"], "parent": {"a": "a", "b": "a"}})
        weights = write(
            tmp_path, "w.json", {"a": {"re": 0, "im": 0}, "b": {"re": "-3/5", "im": "4/5"}}
        )
        code, body = run(capsys, ["gauge", forest, weights])
        assert code == 0 and body["verified"]


class TestMomentsCommand:
    def test_measure(self, tmp_path, capsys):
        m = write(tmp_path, "m.json", {"atoms": [{"t": 1, "w": "1/2"}, {"t": 4, "w": "1/2"}]})
        code, body = run(capsys, ["moments", "--measure", m, "--nmax", "3"])
        assert code == 0 and body["moments"] == ["1/1", "5/2", "17/2", "65/2"]

    def test_shift_vertex(self, tmp_path, capsys):
        s = write(tmp_path, "s.json", ISOMETRY)
        code, body = run(capsys, ["moments", "--shift", s, "--vertex", "x", "--nmax", "4"])
        assert code == 0 and body["feasible"]

    def test_missing_file_exit_2(self, capsys):
        code, body = run(capsys, ["moments", "--measure", "/nonexistent.json"])
        assert code == 2

    def test_float_mode_env(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("SHIFTLAB_MODE", "float")
        m = write(tmp_path, "m.json", {"atoms": [{"t": 1, "w": 1}]})
        code, body = run(capsys, ["moments", "--measure", m, "--nmax", "2"])
        assert code == 0 and body["moments"] == [1.0, 1.0, 1.0]
