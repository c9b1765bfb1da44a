"""The documented schema and golden reports stay in step with the CLI."""
import importlib.util
import json
import math
import sys
from pathlib import Path

import jsonschema
import pytest

from indexlab.cli import main

ROOT = Path(__file__).resolve().parent.parent
SCHEMA = json.loads((ROOT / "docs" / "report.schema.json").read_text())
GOLDEN = ROOT / "docs" / "golden"

spec = importlib.util.spec_from_file_location("make_golden", ROOT / "scripts" / "make_golden.py")
make_golden = importlib.util.module_from_spec(spec)
sys.modules["make_golden"] = make_golden
spec.loader.exec_module(make_golden)

# reports made only of integers, strings and booleans must match byte for byte
EXACT = {"betti", "jackpot", "pick", "localize", "cp1-index", "resolve"}


def close(a, b) -> bool:
    if isinstance(a, dict):
        return isinstance(b, dict) and a.keys() == b.keys() and all(close(a[k], b[k]) for k in a)
    if isinstance(a, list):
        return isinstance(b, list) and len(a) == len(b) and all(close(x, y) for x, y in zip(a, b))
    if isinstance(a, float) or isinstance(b, float):
        return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9)
    return a == b


def test_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(SCHEMA)


def test_one_golden_per_subcommand():
    assert {p.stem for p in GOLDEN.glob("*.json")} == set(make_golden.GOLDEN_ARGS)


@pytest.mark.parametrize("command", sorted(make_golden.GOLDEN_ARGS))
def test_golden_validates_and_reproduces(command):
    stored = (GOLDEN / f"{command}.json").read_text()
    jsonschema.validate(json.loads(stored), SCHEMA)
    fresh = make_golden.render(command)
    if command in EXACT:
        assert fresh == stored
    else:
        assert close(json.loads(fresh), json.loads(stored))


@pytest.mark.parametrize(
    "argv",
    [
        ["gauss-bonnet", "--angles", "1.5", "1.5", "1.5"],
        ["cp1-index"],
        ["jackpot", "--k", "7", "--mode", "formula"],
        ["resolve", "--germ", "y^2+z^3"],
        ["betti", "--surface", "holed", "--genus", "1", "--bc", "relative"],
        ["jackpot", "--k", "-1"],
        ["resolve", "--germ", "x*y*z"],
        ["jackpot", "--k", "20000", "--mode", "brute"],
        ["frobnicate"],
    ],
)
def test_other_reports_validate(capsys, argv):
    main(argv)
    jsonschema.validate(json.loads(capsys.readouterr().out), SCHEMA)
