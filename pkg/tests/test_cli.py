import json

import pytest

from normid import fixtures as fx
from normid.cli import (
    EXIT_DEPTH_CAP,
    EXIT_DOMAIN,
    EXIT_GROUNDING,
    EXIT_IO,
    EXIT_NO_COMPLIANT,
    EXIT_NO_PARSE,
    EXIT_STATE_MISMATCH,
    EXIT_THRESHOLD,
    EXIT_USAGE,
    main,
)


def data(name):
    return str(fx.data_path(name))


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def left_run(tmp_path):
    return write(tmp_path / "left.json", [{"initial_state": [], "actions": ["t3", "t4", "t6", "t7", "t8"]}])


def test_learn_from_left_run(tmp_path, left_run):
    out = tmp_path / "norms.json"
    assert main(["learn", "--domain", data("two_trees.json"), "--runs", left_run, "--out", str(out)]) == 0
    norms = json.loads(out.read_text())
    assert {"modality": "O", "context": "t1", "condition": "t2"} in norms
    assert {"modality": "F", "context": "t1", "condition": "t9"} in norms


def test_recognize_prints_tree(tmp_path, capsys):
    runs = write(tmp_path / "r.json", [{"initial_state": [], "actions": ["a1", "a2", "a3"]}])
    assert main(["recognize", "--domain", data("grammar.json"), "--runs", runs]) == 0
    text = capsys.readouterr().out
    assert text == "run 0:\nT1  [r1]\n  T2  [r3]\n    a1\n    a2\n  T3  [r4]\n    a3\n"
    assert main(["recognize", "--domain", data("grammar.json"), "--runs", runs, "--format", "machine"]) == 0
    assert json.loads(capsys.readouterr().out) == [{"run": 0, "tree": "T1(T2(a1,a2),T3(a3))", "ambiguity": 1}]


def test_plan_writes_runs(tmp_path):
    out = tmp_path / "runs.json"
    argv = ["plan", "--domain", data("travel.json"), "--goals", "travel(aberdeen,paris)", "--out", str(out),
            "--initial", "at(aberdeen)", "connect(aberdeen,london)", "connect(london,paris)"]
    assert main(argv) == 0
    (run,) = json.loads(out.read_text())
    assert run["actions"] == ["goto(aberdeen,london)", "goto(london,paris)"]
    assert run["goal"] == "travel(aberdeen,paris)"


def test_pipeline_violation_free(tmp_path, capsys):
    out = tmp_path / "pipe"
    argv = ["pipeline", "--scenario", data("two_trees_scenario.json"), "-n", "30", "--ot", "1", "--ft", "1",
            "--out", str(out), "--format", "machine"]
    assert main(argv) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["prohibitions"]["recall"] == 1.0
    assert json.loads(capsys.readouterr().out) == report
    # evaluate again from the files
    assert main(["evaluate", "--domain", data("two_trees.json"), "--norms", str(out / "norms.json"),
                 "--planted", data("two_trees_norms.json"), "--runs", str(out / "runs.json"),
                 "--format", "machine"]) == 0
    assert json.loads(capsys.readouterr().out)["prohibitions"]["recall"] == 1.0


def test_subcommands_are_idempotent(tmp_path):
    outputs = []
    for k in range(2):
        d = tmp_path / f"try{k}"
        d.mkdir()
        assert main(["simulate", "--scenario", data("three_plans_scenario.json"), "-n", "50", "--out", str(d / "runs.json")]) == 0
        assert main(["learn-threshold", "--domain", data("three_plans.json"), "--runs", str(d / "runs.json"),
                     "--ot", "3", "--ft", "3", "--out", str(d / "norms.json")]) == 0
        outputs.append(((d / "runs.json").read_bytes(), (d / "norms.json").read_bytes()))
    assert outputs[0] == outputs[1]


def test_seed_override(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["simulate", "--scenario", data("three_plans_scenario.json"), "-n", "40", "--out", str(a)])
    main(["simulate", "--scenario", data("three_plans_scenario.json"), "-n", "40", "--seed", "99", "--out", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_exit_codes(tmp_path, capsys):
    g = data("grammar.json")
    bad = write(tmp_path / "bad.json", [{"initial_state": [], "actions": ["a3"]}])
    assert main(["recognize", "--domain", g, "--runs", bad]) == EXIT_NO_PARSE
    assert "run 0" in capsys.readouterr().err
    assert main(["recognize", "--domain", str(tmp_path / "missing.json"), "--runs", bad]) == EXIT_IO
    assert main(["learn-threshold", "--domain", g, "--runs", bad, "--ot", "0", "--ft", "1"]) == EXIT_THRESHOLD
    assert main(["learn-threshold", "--domain", g, "--runs", bad]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE
    broken = write(tmp_path / "broken.json", {"operators": [{"name": "a", "pre": ["p(X)"]}]})
    assert main(["recognize", "--domain", broken, "--runs", bad]) == EXIT_DOMAIN

    mismatch = write(tmp_path / "mm.json", {
        "operators": [{"name": "a", "pre": ["p"]}, {"name": "b", "add": ["p"]}],
        "methods": [{"name": "m", "task": "T", "subtasks": ["a", "b"]}],
    })
    runs = write(tmp_path / "ab.json", [{"initial_state": [], "actions": ["a", "b"]}])
    assert main(["recognize", "--domain", mismatch, "--runs", runs]) == EXIT_STATE_MISMATCH

    chain = write(tmp_path / "chain.json", {
        "operators": [{"name": "a"}],
        "methods": [{"name": f"m{i}", "task": f"t{i}", "subtasks": [f"t{i + 1}" if i < 5 else "a"]} for i in range(6)],
    })
    assert main(["plan", "--domain", chain, "--goals", "t0", "--depth-cap", "3"]) == EXIT_DEPTH_CAP

    runs = write(tmp_path / "t.json", [{"initial_state": ["at(aberdeen)"], "actions": ["goto(aberdeen,london)"]}])
    assert main(["recognize", "--domain", data("travel.json"), "--runs", runs, "--ground-cap", "5"]) == EXIT_GROUNDING

    sc = write(tmp_path / "sc.json", {
        "domain": data("two_trees.json"),
        "norms": [{"modality": "F", "context": "t2", "condition": "t3"}],
        "goals": [{"task": "t1", "weight": 1}],
    })
    assert main(["simulate", "--scenario", sc, "-n", "3"]) == EXIT_NO_COMPLIANT
