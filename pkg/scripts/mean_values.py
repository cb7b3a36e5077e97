"""Mean of 3^{r3} and the proportion with r3 = 0 as X grows, next to the
predicted limits, for both signs.

    python3 scripts/mean_values.py --X 1000000 --steps 7
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from threerank.arith import ALL, fundamental_array
from threerank.rank3 import rank_table
from threerank.statistics import c_lambda, cohen_lenstra_prob, nh_mean_empirical


@dataclass
class MeanConfig:
    X: int = 10**6
    steps: int = 7
    threads: int = 1


def run(cfg: MeanConfig) -> None:
    table = rank_table(cfg.X, cfg.X, cfg.threads)
    grid = np.unique(np.geomspace(1000, cfg.X, cfg.steps).astype(int))
    print(f"{'sign':>4} {'X':>9} {'|S|':>8} {'mean 3^r':>9} {'target':>7} {'P(r=0)':>7} {'CL':>7}")
    for lam in (-1, 1):
        for X in grid.tolist():
            rep = nh_mean_empirical(X, ALL, lam, table)
            r = table.lookup(fundamental_array(X, ALL, lam))
            p0 = float(np.mean(r == 0))
            print(f"{lam:>4} {X:>9} {rep.population:>8} {rep.statistic:>9.4f} "
                  f"{float(c_lambda(lam)):>7.4f} {p0:>7.4f} {cohen_lenstra_prob(3, 0, lam):>7.4f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--X", type=int, default=MeanConfig.X)
    ap.add_argument("--steps", type=int, default=MeanConfig.steps)
    ap.add_argument("--threads", type=int, default=MeanConfig.threads)
    run(MeanConfig(**vars(ap.parse_args())))
