"""Print the blow-up trace of a germ, its final cycles and the cover's intersection form."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from indexlab.resolution import resolution_report


@dataclass(frozen=True)
class Config:
    germ: str = "y^3+z^5"
    ordering: str = "canonical"


def run(cfg: Config) -> dict:
    rep = resolution_report(cfg.germ, cfg.ordering, trace=True)
    for step in rep["trace"]:
        print(f"step {step['step']} [{step['reason']}, mult {step['multiplicity']}]: " + ", ".join(step["charts"]))
    print("cycles:", ", ".join(f"{c['id']}(m={c['mult']}, {c['self']})" for c in rep["cycles"]))
    print("edges:", rep["edges"])
    if rep["cover"] is None:
        print("double cover:", rep["cover_error"])
    for row in rep["matrix"]:
        print(" ".join(f"{v:>3d}" for v in row))
    print(f"determinant {rep['determinant']}, signature {rep['signature']}, negative definite {rep['negative_definite']}")
    if rep["rochlin_contradiction"] is not None:
        print(f"signature divisible by 16: {rep['divisible_by_16']}; contradiction: {rep['rochlin_contradiction']}")
    return rep


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--germ", default=Config.germ)
    ap.add_argument("--ordering", default=Config.ordering, choices=("canonical", "creation"))
    run(Config(**vars(ap.parse_args())))
