"""Analytic predictions next to their finite-X measurements.

Cohen-Lenstra probabilities, the Nakagawa-Horie count and mean value of
3^{r3}, the lower bound for the proportion with r3 < n, and the Euler
product Omega(3) governing the density of T(X).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import ALL, CongruenceClass, count_S, fundamental_array, primes_upto
from .config import DEFAULT
from .family import NormalizedFamily, is_good_pair, odd_prime_factors
from .rank3 import RankTable


@dataclass
class DensityReport:
    X: float
    population: int
    statistic: float
    prediction: float
    passed: bool = False
    flags: list[str] = field(default_factory=list)

    @property
    def abs_err(self) -> float:
        return abs(self.statistic - self.prediction)

    @property
    def rel_err(self) -> float | None:
        if self.prediction == 0:
            return None
        return self.abs_err / abs(self.prediction)

    def to_json(self) -> dict:
        return {
            "X": self.X,
            "population": self.population,
            "statistic": self.statistic,
            "prediction": self.prediction,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "pass": self.passed,
            "flags": list(self.flags),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


# ------------------------------------------------------- Cohen-Lenstra


def cohen_lenstra_prob(p: int, r: int, lam: int, terms: int | None = None) -> float:
    """Heuristic probability that r_p(D) = r, for D of sign lam."""
    if p == 2 or not _is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if r < 0:
        raise ValueError("r must be non-negative")
    J = terms or DEFAULT.cl_truncation
    start = r + 2 if lam == 1 else r + 1
    expo = r * r + r if lam == 1 else r * r
    tail = math.prod(1 - p ** -j for j in range(start, J + 1))
    head = math.prod(1 - p ** -j for j in range(1, r + 1))
    return p**-expo * tail / head


def c_lambda(lam: int) -> Fraction:
    return Fraction(4, 3) if lam == 1 else Fraction(2)


def rank_lt_density_bound(n: int, lam: int) -> Fraction:
    """Lower bound (3^n - c(lam)) / (3^n - 1) on the proportion with r3 < n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (3**n - c_lambda(lam)) / (3**n - 1)


# --------------------------------------------------- Nakagawa-Horie


def euler_phi(N: int) -> int:
    out = N
    for p in _prime_divisors(N):
        out = out // p * (p - 1)
    return out


def _prime_divisors(N: int) -> list[int]:
    ps = odd_prime_factors(N)
    return [2, *ps] if N % 2 == 0 else ps


def nh_count_prediction(X: float, cls: CongruenceClass = ALL) -> float:
    """Main term 3X / (pi^2 phi(N)) * prod_{p | N} q / (1 + p), q = 4 at p = 2."""
    N = cls.N
    prod = 1.0
    for p in _prime_divisors(N):
        q = 4 if p == 2 else p
        prod *= q / (1 + p)
    return 3 * X / (math.pi**2 * euler_phi(N)) * prod


def class_is_good(cls: CongruenceClass) -> bool:
    # m = 0 stands for the residue N itself
    return is_good_pair(cls.m or cls.N, cls.N)


def count_report(X: float, cls: CongruenceClass = ALL, lam: int = 1, tol: float = 0.005) -> DensityReport:
    n = count_S(X, cls, lam)
    pred = nh_count_prediction(X, cls)
    rep = DensityReport(X, n, float(n), pred)
    rep.passed = rep.rel_err is not None and rep.rel_err <= tol
    if not class_is_good(cls):
        rep.flags.append("pair-not-good")
    return rep


def _ranks_on(X: float, cls: CongruenceClass, lam: int, ranks: RankTable) -> np.ndarray:
    S = fundamental_array(X, cls, lam)
    if S.size == 0:
        raise ValueError(f"S is empty at X={X}")
    return ranks.lookup(S).astype(np.int64)


def three_power_sum(X: float, cls: CongruenceClass, lam: int, ranks: RankTable) -> tuple[int, int]:
    """(|S|, sum over S of 3^{r3}) as exact integers."""
    r = _ranks_on(X, cls, lam, ranks)
    return int(r.size), int(np.sum(3**r))


def nh_mean_empirical(X: float, cls: CongruenceClass, lam: int, ranks: RankTable,
                      tol: float = 0.15) -> DensityReport:
    size, total = three_power_sum(X, cls, lam, ranks)
    rep = DensityReport(X, size, total / size, float(c_lambda(lam)))
    rep.passed = rep.rel_err <= tol
    if not class_is_good(cls):
        rep.flags.append("pair-not-good")
    return rep


def rank_lt_density_empirical(X: float, cls: CongruenceClass, lam: int, n: int,
                              ranks: RankTable) -> DensityReport:
    r = _ranks_on(X, cls, lam, ranks)
    below = int(np.count_nonzero(r < n))
    bound = rank_lt_density_bound(n, lam)
    rep = DensityReport(X, int(r.size), below / r.size, float(bound))
    rep.passed = Fraction(below, int(r.size)) >= bound
    return rep


def proof_inequality(X: float, cls: CongruenceClass, lam: int, n: int,
                     ranks: RankTable) -> tuple[bool, dict]:
    """Check (3^n - 1) #{r3 < n} >= 3^n |S| - sum 3^{r3} in exact integers."""
    r = _ranks_on(X, cls, lam, ranks)
    below = int(np.count_nonzero(r < n))
    size = int(r.size)
    total = int(np.sum(3**r))
    lhs = (3**n - 1) * below
    rhs = 3**n * size - total
    return lhs >= rhs, {"below": below, "size": size, "sum3": total, "lhs": lhs, "rhs": rhs}


def rank_distribution(X: float, lam: int, ranks: RankTable, cls: CongruenceClass = ALL) -> dict[int, int]:
    r = _ranks_on(X, cls, lam, ranks)
    return {int(k): int(v) for k, v in enumerate(np.bincount(r)) if v}


# -------------------------------------------------------------- Omega(3)


def _linear_roots(alpha: int, beta: int, p: int):
    """Solutions of alpha x + beta = 0 mod p^2 as ('all'|'class'|'point'|None, residue)."""
    q = p * p
    if alpha % p:
        return "point", (-beta * pow(alpha, -1, q)) % q
    if alpha % q == 0:
        return ("all", 0) if beta % q == 0 else (None, 0)
    if beta % p:
        return None, 0
    a1, b1 = (alpha // p) % p, (beta // p) % p
    return "class", (-b1 * pow(a1, -1, p)) % p


def omega_linear(system: Sequence[tuple[int, int]], p: int) -> int:
    """Residues x mod p^2 where some alpha x + beta is divisible by p^2."""
    classes, points = set(), set()
    for alpha, beta in system:
        kind, res = _linear_roots(alpha, beta, p)
        if kind == "all":
            return p * p
        if kind == "class":
            classes.add(res)
        elif kind == "point":
            points.add(res)
    return p * len(classes) + sum(1 for x in points if x % p not in classes)


def omega_p(p: int, fam: NormalizedFamily) -> int:
    return omega_linear(fam.linear_system(), p)


@dataclass
class OmegaProduct:
    value: float
    tail_bound: float
    p_max: int
    omegas: dict[int, int]

    @property
    def max_omega(self) -> int:
        return max(self.omegas.values(), default=0)


def omega3_product_linear(system: Sequence[tuple[int, int]], p_max: int | None = None) -> OmegaProduct:
    """prod_p (1 - omega(p) / p^2) truncated at p_max.

    Beyond p_max every prime not dividing a slope has omega(p) <= k, the
    number of polynomials, so the missing factor lies in [1 - k/p_max, 1];
    tail_bound is value * k / p_max. Primes above p_max that divide a slope
    are included exactly.
    """
    p_max = p_max or DEFAULT.omega_pmax
    if p_max < 3:
        raise ValueError("p_max must be >= 3")
    ps = set(primes_upto(p_max).tolist())
    for alpha, _ in system:
        ps.update(q for q in _prime_divisors(abs(alpha)) if q > p_max)
    value = 1.0
    omegas = {}
    for p in sorted(ps):
        w = omega_linear(system, p)
        omegas[p] = w
        value *= 1 - w / (p * p)
    k = len(system)
    return OmegaProduct(value, value * k / p_max, p_max, omegas)


def omega3_product(fam: NormalizedFamily, p_max: int | None = None) -> OmegaProduct:
    return omega3_product_linear(fam.linear_system(), p_max)


def final_density_bound(fam: NormalizedFamily, p_max: int | None = None) -> float:
    """Omega(3) / ((3^{n+1} - 3) B): lower bound for #witnesses / X."""
    om = omega3_product(fam, p_max)
    return om.value / ((3 ** (fam.n_rank + 1) - 3) * fam.B)
