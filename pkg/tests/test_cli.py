import json
import subprocess
import sys

import pytest

from indexlab.cli import BUILTIN_SURFACES, build_parser, dumps, jsonable, main

# fast argument sets, one per subcommand
FAST = {
    "gauss-bonnet": ["--surface", "octahedron"],
    "betti": ["--genus", "1"],
    "heat-index": ["--surface", "icosphere", "--level", "1"],
    "double": ["--genus", "1"],
    "periods": ["--genus", "1"],
    "jackpot": ["--k", "40"],
    "pick": ["--vertices", "0,0;4,0;0,4"],
    "localize": [],
    "cp1-index": ["--k", "3"],
    "curvature": ["--radius", "10", "--steps", "2048"],
    "resolve": ["--germ", "y^2+z^3"],
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_every_subcommand_is_covered():
    sub = build_parser()._subparsers._group_actions[0]
    assert set(sub.choices) == set(FAST)


@pytest.mark.parametrize("command", sorted(FAST))
def test_report_shape(capsys, command):
    code, out, err = run(capsys, command, *FAST[command])
    assert code == 0, out
    assert out.count("\n") == 1
    report = json.loads(out)
    assert report["schema_version"] == 1
    assert report["command"] == command
    assert report["status"] == "ok" and "error" not in report
    assert isinstance(report["result"], dict) and isinstance(report["inputs"], dict)
    assert err.startswith(f"indexlab {command}: ok")


@pytest.mark.parametrize("command", sorted(FAST))
def test_byte_identical_reruns(capsys, command):
    _, first, _ = run(capsys, command, *FAST[command])
    _, second, _ = run(capsys, command, *FAST[command])
    assert first == second
    report = json.loads(first)
    assert first.strip() == json.dumps(report, sort_keys=True, separators=(",", ":"))


@pytest.mark.parametrize("command", sorted(FAST))
def test_help_lists_flags_and_defaults(capsys, command):
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices[command]
    assert main([command, "--help"]) == 0
    text = capsys.readouterr().out
    for action in sub._actions:
        for flag in action.option_strings:
            assert flag in text
        if action.option_strings and action.default not in (None, False) and action.dest != "help":
            assert "default:" in text
            assert action.metavar is None or action.metavar in text or action.choices


def test_jackpot_example(capsys):
    code, out, _ = run(capsys, "jackpot", "--k", "4000", "--mode", "formula")
    assert code == 0
    assert json.loads(out)["result"]["formula"] == "40014001"


def test_resolve_example(capsys):
    code, out, _ = run(capsys, "resolve", "--germ", "y^3+z^5")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["signature"] == -8 and result["rochlin_contradiction"] is True


@pytest.mark.parametrize(
    "argv,code,kind",
    [
        (["jackpot", "--k", "-1"], 1, "usage"),
        (["jackpt"], 1, "usage"),
        (["jackpot", "--kk", "3"], 1, "usage"),
        ([], 1, "usage"),
        (["pick"], 1, "usage"),
        (["gauss-bonnet", "--angles", "1", "1", "1"], 2, "domain"),
        (["resolve", "--germ", "x*y*z"], 2, "parse"),
        (["resolve", "--germ", "1+y"], 2, "domain"),
        (["localize", "--weights", "2,4,1"], 2, "domain"),
        (["curvature", "--steps", "4"], 2, "domain"),
        (["pick", "--vertices", "0,0;0,4;4,0"], 2, "domain"),
        (["jackpot", "--k", "20000", "--mode", "brute"], 3, "resource"),
        (["heat-index", "--surface", "icosphere", "--level", "3"], 3, "resource"),
        (["betti", "--mesh", "/nonexistent/file.off"], 2, "io"),
    ],
)
def test_exit_codes(capsys, argv, code, kind):
    got, out, err = run(capsys, *argv)
    assert got == code
    report = json.loads(out)
    assert report["status"] == "error" and "result" not in report
    assert report["error"]["kind"] == kind
    assert report["error"]["message"]
    assert "error" in err


def test_subcommand_suggestion(capsys):
    _, out, _ = run(capsys, "jackpt")
    assert "did you mean 'jackpot'" in json.loads(out)["error"]["message"]


def test_flag_suggestion(capsys):
    _, out, _ = run(capsys, "jackpot", "--kk", "3")
    assert "did you mean --k" in json.loads(out)["error"]["message"]


def test_choice_suggestion(capsys):
    _, out, _ = run(capsys, "betti", "--bc", "relativ")
    assert "did you mean 'relative'" in json.loads(out)["error"]["message"]


def test_pick_from_file(capsys, tmp_path):
    path = tmp_path / "tri.csv"
    path.write_text("0,0\n4000,0\n0,20000\n")
    code, out, _ = run(capsys, "pick", "--polygon", str(path))
    assert code == 0
    assert json.loads(out)["result"]["total"] == "40014001"


def test_mesh_file_ingestion(capsys, tmp_path):
    from indexlab.mesh import octahedron, write_off

    path = tmp_path / "oct.off"
    write_off(octahedron(), path)
    code, out, _ = run(capsys, "betti", "--mesh", str(path))
    assert code == 0
    assert json.loads(out)["result"]["betti"] == [1, 0, 1]


@pytest.mark.parametrize("surface", BUILTIN_SURFACES)
def test_builtin_surfaces_load(capsys, surface):
    code, out, _ = run(capsys, "gauss-bonnet", "--surface", surface, "--level", "1", "--genus", "1")
    report = json.loads(out)
    if surface == "holed":
        assert code == 2  # boundary vertices carry no defect
    else:
        assert code == 0 and report["result"]["residual"] <= 1e-9


def test_big_integers_become_strings():
    assert jsonable(2**64) == str(2**64)
    assert jsonable(2**63 - 1) == 2**63 - 1
    assert dumps({"b": 1, "a": [2**70]}) == '{"a":["%d"],"b":1}' % 2**70


def test_module_entry_point_streams():
    proc = subprocess.run(
        [sys.executable, "-m", "indexlab", "jackpot", "--k", "10"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"] == {"brute": "286", "formula": "286", "k": 10, "match": True}
    assert proc.stderr.startswith("indexlab jackpot: ok")
