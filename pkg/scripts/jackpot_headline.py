"""Count the coin jackpots three ways and time each one."""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from indexlab.lattice import JackpotInstance, LatticePolygon, count_jackpots, pick_count
from indexlab.localization import localized_index


@dataclass(frozen=True)
class Config:
    k: int = 4000
    workers: int = 1


def timed(fn):
    t0 = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - t0


def run(cfg: Config) -> dict:
    inst = JackpotInstance(cfg.k)
    poly = localized_index()
    rows = {
        "closed form": timed(lambda: count_jackpots(inst, "formula")),
        "enumeration": timed(lambda: count_jackpots(inst, "brute", cfg.workers)),
        "localization": timed(lambda: int(poly(cfg.k))),
        "pick": timed(lambda: pick_count(LatticePolygon(((0, 0), (cfg.k, 0), (0, 5 * cfg.k)))).total),
    }
    for name, (value, secs) in rows.items():
        print(f"{name:>12}: {value:>14,d}  ({secs:.3f} s)")
    values = {v for v, _ in rows.values()}
    print("all agree" if len(values) == 1 else f"DISAGREEMENT: {sorted(values)}")
    return {name: value for name, (value, _) in rows.items()}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=Config.k)
    ap.add_argument("--workers", type=int, default=Config.workers)
    run(Config(**vars(ap.parse_args())))
