"""Build (or extend) the rank cache and print the 3-rank distribution.

    python3 scripts/build_table.py --X 1000000 --threads 4 --cache ranks/ranks.csv
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from threerank.rank3 import rank_table
from threerank.statistics import rank_distribution
from threerank.store import cache_load, cache_merge, cache_store


@dataclass
class TableConfig:
    X: int = 10**6
    threads: int = 1
    cache: str = "ranks/ranks.csv"


def run(cfg: TableConfig) -> None:
    t0 = time.perf_counter()
    table = rank_table(cfg.X, cfg.X, cfg.threads)
    print(f"{len(table)} fundamental discriminants with |D| < {cfg.X} in {time.perf_counter() - t0:.1f} s")
    from pathlib import Path

    path = Path(cfg.cache)
    if path.exists():
        table = cache_merge(cache_load(path), table)
    cache_store(table, path)
    for lam, name in ((-1, "imaginary"), (1, "real")):
        print(name, rank_distribution(cfg.X, lam, table))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--X", type=int, default=TableConfig.X)
    ap.add_argument("--threads", type=int, default=TableConfig.threads)
    ap.add_argument("--cache", default=TableConfig.cache)
    run(TableConfig(**vars(ap.parse_args())))
