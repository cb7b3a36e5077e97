"""The acceptance criteria as library functions.

Each ``criterion_k`` returns a CriterionResult. Suites group them by name so
the CLI ``verify`` command and the pytest module run identical code.
"""
from __future__ import annotations

import random
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from .arith import ALL, CongruenceClass, count_S, fundamental_array, is_squarefree, fundamental_discriminant_of
from .bqf import oracle_three_rank
from .family import LinearPolynomial, FamilySpec, count_T, normalize
from .rank3 import RankTable, rank_table, rank_table_interval, three_rank
from .search import (IntegerValuedPolynomial, corollary_witnesses, polyprog_witness,
                     required_rank_bounds, theorem1_witnesses, verify_polyprog, verify_witness)
from .statistics import (cohen_lenstra_prob, count_report, nh_mean_empirical, omega3_product,
                         omega_p, proof_inequality)
from .store import cache_load, cache_store, ensure_ranks, to_csv


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"criterion {self.number:2d} {self.name}: {'PASS' if self.passed else 'FAIL'}"


SHARED_X = 10**6


@lru_cache(maxsize=1)
def shared_table() -> RankTable:
    """All fundamental D with |D| < 10^6; read from the cache directory if one is set."""
    return ensure_ranks(-(SHARED_X - 1), SHARED_X - 1)


def _ranks_for(lo: int, hi: int) -> RankTable:
    t = shared_table()
    if t.covers(lo, min(hi, -1)) and t.covers(max(lo, 1), hi):
        return t
    return ensure_ranks(lo, hi)


def criterion_1(X: int = 10**5) -> CriterionResult:
    bad = []
    checked = 0
    for D in fundamental_array(X, ALL, -1).tolist():
        checked += 1
        if three_rank(D) != oracle_three_rank(D):
            bad.append(D)
    return CriterionResult(1, "oracle equivalence", not bad and checked > 0,
                           {"checked": checked, "mismatches": bad[:20]})


def criterion_2(dmax: int = 10**4) -> CriterionResult:
    bad = []
    checked = 0
    for d in range(2, dmax + 1):
        if not is_squarefree(d):
            continue
        checked += 1
        a = three_rank(fundamental_discriminant_of(d))
        b = three_rank(fundamental_discriminant_of(-3 * d))
        if not a <= b <= a + 1:
            bad.append((d, a, b))
    return CriterionResult(2, "Scholz reflection", not bad, {"checked": checked, "violations": bad[:20]})


def criterion_3(X: int = 10**6, tol: float = 0.005) -> CriterionResult:
    rows = []
    for m, N in ((0, 1), (1, 4), (1, 3)):
        for lam in (-1, 1):
            rep = count_report(X, CongruenceClass(m, N), lam, tol)
            rows.append({"m": m, "N": N, "sign": lam, "count": rep.population,
                         "prediction": rep.prediction, "rel_err": rep.rel_err, "pass": rep.passed})
    return CriterionResult(3, "counting asymptotic", all(r["pass"] for r in rows), {"rows": rows})


def criterion_4(tol: float = 0.15) -> CriterionResult:
    t = shared_table()
    rows = []
    ok = True
    for lam in (-1, 1):
        big = nh_mean_empirical(10**6, ALL, lam, t, tol)
        small = nh_mean_empirical(10**4, ALL, lam, t, tol)
        shrinks = big.rel_err < small.rel_err
        ok &= big.passed and shrinks
        rows.append({"sign": lam, "mean_1e6": big.statistic, "mean_1e4": small.statistic,
                     "target": big.prediction, "rel_err_1e6": big.rel_err,
                     "rel_err_1e4": small.rel_err, "within_tol": big.passed, "error_shrinks": shrinks})
    return CriterionResult(4, "Nakagawa-Horie mean", ok, {"rows": rows})


def criterion_5() -> CriterionResult:
    t = shared_table()
    failures = []
    cases = 0
    for X in (10**4, 10**5, 10**6):
        for m, N in ((0, 1), (1, 4)):
            for lam in (-1, 1):
                for n in (1, 2, 3):
                    cases += 1
                    holds, info = proof_inequality(X, CongruenceClass(m, N), lam, n, t)
                    if not holds:
                        failures.append({"X": X, "m": m, "N": N, "sign": lam, "n": n, **info})
    return CriterionResult(5, "density proof inequality", not failures,
                           {"cases": cases, "failures": failures})


CL_TARGETS = {-1: 0.5601, 1: 0.8402}


def criterion_6(X: int = 10**6, tol: float = 0.03, rmax: int = 40) -> CriterionResult:
    t = shared_table()
    rows = []
    ok = True
    for lam in (-1, 1):
        r = t.lookup(fundamental_array(X, ALL, lam))
        prop = float(np.count_nonzero(r == 0)) / r.size
        total = sum(cohen_lenstra_prob(3, k, lam) for k in range(rmax + 1))
        close = abs(prop - CL_TARGETS[lam]) <= tol
        sums = abs(total - 1) <= 1e-9
        ok &= close and sums
        rows.append({"sign": lam, "proportion_r0": prop, "target": CL_TARGETS[lam],
                     "abs_err": abs(prop - CL_TARGETS[lam]), "prob_sum": total,
                     "within_tol": close, "sum_is_one": sums})
    return CriterionResult(6, "Cohen-Lenstra", ok, {"rows": rows})


CRIT7_SPEC = FamilySpec(1, (LinearPolynomial(1, 3),), (LinearPolynomial(1, 1),))


def criterion_7(X: int = 10**5, samples: int = 20, seed: int = 20240611) -> CriterionResult:
    neg, pos = required_rank_bounds(normalize(CRIT7_SPEC), X)
    rep = theorem1_witnesses(CRIT7_SPEC, X, _ranks_for(-(neg - 1), pos - 1))
    pool = rep.witnesses.tolist()
    picked = random.Random(seed).sample(pool, min(samples, len(pool)))
    reverified = [D for D in picked if verify_witness(D, CRIT7_SPEC)]
    ok = rep.satisfied and len(picked) == samples and len(reverified) == samples
    return CriterionResult(7, "simultaneous small rank witnesses", ok, {
        "total": rep.total, "scanned": rep.scanned, "density": float(rep.density),
        "bound": float(rep.bound), "sampled": picked, "reverified": len(reverified)})


def criterion_8(X: int = 10**5) -> CriterionResult:
    from .search import corollary_spec

    neg, pos = required_rank_bounds(normalize(corollary_spec(1, 2)), X)
    rep = corollary_witnesses(1, 2, X, _ranks_for(-(neg - 1), pos - 1))
    ok = rep.total > 0 and rep.satisfied
    return CriterionResult(8, "consecutive shifts", ok, {
        "total": rep.total, "scanned": rep.scanned, "density": float(rep.density),
        "bound": float(rep.bound)})


def family_corpus() -> list[FamilySpec]:
    """Admissible families exercised by the Omega(3) checks."""
    from .search import corollary_spec

    x = LinearPolynomial
    return [
        FamilySpec(1, (x(1, 3),), ()),
        CRIT7_SPEC,
        corollary_spec(1, 1),
        corollary_spec(1, 2),
        corollary_spec(2, 1),
        FamilySpec(1, (), (x(1, 3),)),
        FamilySpec(1, (x(4, 1),), (x(4, 5),)),
        FamilySpec(2, (x(3, 5), x(1, 7)), (x(9, 3),)),
        FamilySpec(2, (x(8, 5),), (x(5, 2), x(3, 1))),
        FamilySpec(1, (x(25, 5),), ()),
        FamilySpec(2, (x(16, 12),), (x(7, 4),)),
        FamilySpec(1, (x(12, 5),), ()),
    ]


def criterion_9(X: int = 10**7, p_max: int = 10**5, tol: float = 0.01) -> CriterionResult:
    fam = normalize(FamilySpec(1, (LinearPolynomial(1, 3),), ()))
    om = omega3_product(fam, p_max)
    measured = count_T(X, fam) / X
    predicted = om.value / fam.B
    rel = abs(measured - predicted) / predicted
    corpus = []
    ok = rel <= tol
    for spec in family_corpus():
        nf = normalize(spec)
        w2 = omega_p(2, nf)
        value = omega3_product(nf, 10**4).value
        corpus.append({"family": [str(f) for f in spec.polys], "omega_2": w2, "omega3": value})
        ok &= w2 == 0 and value > 0
    return CriterionResult(9, "Omega(3) density", ok, {
        "measured": measured, "predicted": predicted, "rel_err": rel, "corpus": corpus})


def criterion_10() -> CriterionResult:
    polys = [IntegerValuedPolynomial.from_power([0, 1]), IntegerValuedPolynomial.from_power([0, 0, 1])]
    res = polyprog_witness(polys, 1, 100, 10)
    ok = res.found and verify_polyprog(polys, 1, *res.witness) and res.ranks == [0, 0]
    return CriterionResult(10, "polynomial progression witness", ok, res.to_json())


def criterion_11(lo: int = -10**5, hi: int = 10**5) -> CriterionResult:
    one = to_csv(rank_table_interval(lo, hi, threads=1))
    eight = to_csv(rank_table_interval(lo, hi, threads=8))
    with tempfile.TemporaryDirectory() as tmp:
        p = Path(tmp) / "ranks.csv"
        q = Path(tmp) / "again.csv"
        cache_store(rank_table_interval(-1000, 1000), p)
        cache_store(cache_load(p), q)
        round_trip = p.read_bytes() == q.read_bytes() and \
            p.with_name("ranks.csv.manifest.json").read_bytes() == q.with_name("again.csv.manifest.json").read_bytes()
    ok = one == eight and round_trip
    return CriterionResult(11, "determinism", ok, {
        "threads_identical": one == eight, "rows": one.count("\n") - 1, "cache_round_trip": round_trip})


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11,
}

SUITES: dict[str, tuple[int, ...]] = {
    "full": tuple(CRITERIA),
    "fast": (2, 3, 10, 11),
    "statistics": (3, 4, 5, 6),
    "witnesses": (7, 8, 9, 10),
    **{f"c{k}": (k,) for k in CRITERIA},
}


def run_suite(name: str, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    out = []
    for k in SUITES[name]:
        res = CRITERIA[k]()
        if echo:
            echo(res.line())
        out.append(res)
    return out
