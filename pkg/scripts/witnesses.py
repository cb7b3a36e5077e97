"""Witness densities for a family against the guaranteed lower bounds.

    python3 scripts/witnesses.py --family fam.txt --X 100000
    python3 scripts/witnesses.py --corollary 1 2 --X 100000
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from threerank.family import normalize, parse_family
from threerank.rank3 import rank_table
from threerank.search import corollary_spec, required_rank_bounds, theorem1_witnesses


@dataclass
class WitnessConfig:
    X: int = 10**5
    family: str | None = None
    corollary: list[int] = field(default_factory=lambda: [1, 2])
    threads: int = 1


def run(cfg: WitnessConfig) -> None:
    spec = parse_family(Path(cfg.family).read_text()) if cfg.family else corollary_spec(*cfg.corollary)
    fam = normalize(spec)
    neg, pos = required_rank_bounds(fam, cfg.X)
    table = rank_table(neg, pos, cfg.threads)
    rep = theorem1_witnesses(spec, cfg.X, table)
    print("polynomials:", ", ".join(("+" if p.lam == 1 else "-") + f"({p.m}x+{p.n})" for p in fam.polys))
    print(f"|T(X)| = {rep.scanned}, witnesses = {rep.total}")
    print(f"density in T(X) = {float(rep.density):.4f}  (bound {float(rep.bound):.4f})")
    print(f"witnesses / X   = {rep.extra['density_per_X']:.6f}  (bound {rep.extra['omega_bound_per_X']:.6f})")
    for ex in rep.extra["examples"]:
        print("  ", ex)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--X", type=int, default=WitnessConfig.X)
    ap.add_argument("--family")
    ap.add_argument("--corollary", type=int, nargs=2, metavar=("N", "PART"), default=[1, 2])
    ap.add_argument("--threads", type=int, default=1)
    run(WitnessConfig(**vars(ap.parse_args())))
