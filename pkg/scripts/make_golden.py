"""Regenerate the golden CLI reports under docs/golden/."""
from __future__ import annotations

import contextlib
import io
from dataclasses import dataclass
from pathlib import Path

from indexlab.cli import main

GOLDEN_ARGS: dict[str, list[str]] = {
    "gauss-bonnet": ["--surface", "icosphere", "--level", "2"],
    "betti": ["--surface", "holed", "--genus", "2"],
    "heat-index": ["--surface", "genus", "--genus", "2"],
    "double": ["--genus", "2"],
    "periods": ["--genus", "2"],
    "jackpot": ["--k", "4000"],
    "pick": ["--vertices", "0,0;4000,0;0,20000"],
    "localize": [],
    "cp1-index": ["--k", "4"],
    "curvature": ["--radius", "1000", "--steps", "100000"],
    "resolve": ["--germ", "y^3+z^5", "--trace"],
}


@dataclass(frozen=True)
class Config:
    out_dir: Path = Path(__file__).resolve().parent.parent / "docs" / "golden"


def render(command: str) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = main([command, *GOLDEN_ARGS[command]])
    if code != 0:
        raise SystemExit(f"{command} exited with {code}: {buf.getvalue()}")
    return buf.getvalue()


def run(cfg: Config) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for command in GOLDEN_ARGS:
        path = cfg.out_dir / f"{command}.json"
        path.write_text(render(command))
        print(f"wrote {path}")


if __name__ == "__main__":
    run(Config())
