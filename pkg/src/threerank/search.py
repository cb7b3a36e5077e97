"""Finite-X witness engines for simultaneous small 3-rank.

``theorem1_witnesses`` scans T(X) for D at which every image discriminant
has r3 < n; ``corollary_witnesses`` does the same for the consecutive
shifts x + i; ``polyprog_witness`` searches a grid of (a, d) for a
polynomial progression a + g_i(d) of discriminants with r3 < n.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .arith import FundamentalDiscriminant, fundamental_discriminant_of, is_fundamental
from .config import DEFAULT
from .family import FamilySpec, LinearPolynomial, NormalizedFamily, T_members, in_T, normalize
from .rank3 import RankTable, three_rank
from .statistics import final_density_bound


@dataclass
class WitnessReport:
    witnesses: np.ndarray
    scanned: int
    bound: Fraction
    X: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return int(len(self.witnesses))

    @property
    def density(self) -> Fraction:
        return Fraction(self.total, self.scanned) if self.scanned else Fraction(0)

    @property
    def satisfied(self) -> bool:
        return self.scanned > 0 and self.density >= self.bound

    def to_json(self, cap: int | None = None) -> dict:
        cap = DEFAULT.witness_cap if cap is None else cap
        w = self.witnesses
        out = {
            "witnesses": [v if isinstance(v, (int, list)) else _plain(v) for v in list(w[:cap])],
            "total": self.total,
            "scanned": self.scanned,
            "density": float(self.density),
            "bound": float(self.bound),
            "satisfied": self.satisfied,
        }
        out.update(self.extra)
        return out

    def dumps(self, cap: int | None = None) -> str:
        return json.dumps(self.to_json(cap))


def _plain(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    return int(v)


def theorem_bound(n: int) -> Fraction:
    return Fraction(1, 3 ** (n + 1) - 3)


def required_rank_bounds(fam: NormalizedFamily, X: float) -> tuple[int, int]:
    """(Xneg, Xpos) such that rank_table(Xneg, Xpos) covers every image for D < X."""
    neg = pos = 2
    for p in fam.polys:
        top = p.l_signed * ((p.m * math.ceil(X) + p.n) >> p.u) + 1
        if p.lam == 1:
            pos = max(pos, top)
        else:
            neg = max(neg, top)
    return neg, pos


def images(fam: NormalizedFamily, D: np.ndarray) -> list[np.ndarray]:
    return [p.image(D) for p in fam.polys]


def theorem1_witnesses(spec: FamilySpec, X: float, ranks: RankTable,
                       omega_pmax: int | None = None) -> WitnessReport:
    """Witnesses D in T(X) with r3(lam_i l_i f~_i(D)) < n for all i."""
    fam = normalize(spec)
    D = T_members(X, fam)
    ok = np.ones(D.size, dtype=bool)
    imgs = images(fam, D)
    # f~_i(D) = 1 gives the trivial field Q, not a quadratic discriminant
    degenerate = np.zeros(D.size, dtype=bool)
    for img in imgs:
        degenerate |= img == 1
    for img in imgs:
        r = np.zeros(D.size, dtype=np.int64)
        r[~degenerate] = ranks.lookup(img[~degenerate])
        ok &= r < spec.n_rank
    ok &= ~degenerate
    rep = WitnessReport(D[ok], int(D.size), theorem_bound(spec.n_rank), X)
    rep.extra["degenerate"] = D[degenerate].tolist()
    rep.extra["density_per_X"] = rep.total / X
    rep.extra["omega_bound_per_X"] = final_density_bound(fam, omega_pmax)
    rep.extra["examples"] = [witness_detail(int(d), fam, ranks) for d in rep.witnesses[:5]]
    return rep


def witness_detail(D: int, fam: NormalizedFamily, ranks: RankTable | None = None) -> dict:
    raw = [p.lam * (p.m * D + p.n) for p in fam.polys]
    imgs = [int(p.image(D)) for p in fam.polys]
    r3 = [ranks[v] if ranks is not None else three_rank(v) for v in imgs]
    return {"D": D, "values": raw, "images": imgs, "r3": r3}


def verify_witness(D: int, spec: FamilySpec) -> bool:
    """Re-check a witness from scratch, without any table."""
    fam = normalize(spec)
    if not in_T(D, fam):
        return False
    for i, p in enumerate(fam.polys):
        if not in_T(D, fam, i):
            return False
        v = int(p.image(D))
        if not is_fundamental(v):
            return False
        # same field as lam * f~_i(D); differs from lam * f_i(D) when u_i is odd
        if fundamental_discriminant_of(p.lam * p(D)).value != v:
            return False
        if three_rank(v) >= spec.n_rank:
            return False
    return True


def corollary_spec(n: int, part: int) -> FamilySpec:
    if part == 1:
        shifts = range(1, 3**n - 1)
        return FamilySpec(n, (), tuple(LinearPolynomial(1, i) for i in shifts))
    if part == 2:
        shifts = range(1, 3 ** (n + 1) - 3)
        return FamilySpec(n, tuple(LinearPolynomial(1, i) for i in shifts), ())
    raise ValueError("part must be 1 or 2")


def corollary_witnesses(n: int, part: int, X: float, ranks: RankTable) -> WitnessReport:
    return theorem1_witnesses(corollary_spec(n, part), X, ranks)


# ------------------------------------------------------ polynomial progressions


@dataclass(frozen=True)
class IntegerValuedPolynomial:
    """g(d) = sum_j c_j C(d, j) for j >= 1; no constant term."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if not self.coeffs or not any(self.coeffs):
            raise ValueError("polynomial is identically zero")

    @classmethod
    def from_binomial(cls, coeffs: Sequence[int]) -> "IntegerValuedPolynomial":
        """Coefficients of C(d,0), C(d,1), ...; the first must be 0."""
        if coeffs[0] != 0:
            raise ValueError("polynomial has a constant term")
        return cls(tuple(coeffs[1:]))

    @classmethod
    def from_power(cls, coeffs: Sequence[Fraction | int]) -> "IntegerValuedPolynomial":
        """Rational coefficients of d^0, d^1, ...; converted via finite differences."""
        if coeffs[0] != 0:
            raise ValueError("polynomial has a constant term")
        deg = len(coeffs) - 1
        vals = [sum(Fraction(c) * x**k for k, c in enumerate(coeffs)) for x in range(deg + 1)]
        binom = []
        for _ in range(deg + 1):
            binom.append(vals[0])
            vals = [b - a for a, b in zip(vals, vals[1:])]
        if any(b.denominator != 1 for b in binom):
            raise ValueError("polynomial is not integer valued")
        return cls.from_binomial([int(b) for b in binom])

    def __call__(self, d: int) -> int:
        return sum(c * math.comb(d, j) for j, c in enumerate(self.coeffs, 1))


def parse_polys(text: str) -> list[IntegerValuedPolynomial]:
    """One polynomial per line: ``binom c0 c1 ...`` or ``power c0 c1 ...``."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, *nums = line.split()
        try:
            vals = [Fraction(x) for x in nums]
            if not vals:
                raise ValueError("no coefficients")
            if kind == "binom":
                if any(v.denominator != 1 for v in vals):
                    raise ValueError("binomial coefficients must be integers")
                out.append(IntegerValuedPolynomial.from_binomial([int(v) for v in vals]))
            elif kind == "power":
                out.append(IntegerValuedPolynomial.from_power(vals))
            else:
                raise ValueError(f"unknown kind {kind!r}")
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}") from None
    if not out:
        raise ValueError("no polynomials given")
    return out


@dataclass
class PolyprogResult:
    witness: tuple[int, int] | None
    scanned: int
    values: list[int] = field(default_factory=list)
    ranks: list[int] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        if self.witness is None:
            return {"found": False, "scanned": self.scanned}
        a, d = self.witness
        return {"found": True, "a": a, "d": d, "values": self.values, "r3": self.ranks,
                "scanned": self.scanned}


@lru_cache(maxsize=1 << 16)
def _rank_cached(D: int) -> int:
    return three_rank(D)


def polyprog_witness(polys: Sequence[IntegerValuedPolynomial], n: int, a_max: int, d_max: int,
                     rank: Callable[[int], int] | None = None,
                     reduce_to_field: bool = False) -> PolyprogResult:
    """First (d, a) in (d ascending, a ascending) order with every a + g_i(d)
    a fundamental discriminant of 3-rank < n.

    With reduce_to_field, each value is replaced by the discriminant of
    Q(sqrt(value)) instead of being required to be fundamental.
    """
    if not polys:
        raise ValueError("need at least one polynomial")
    rank = rank or _rank_cached
    scanned = 0
    for d in range(1, d_max + 1):
        g = [p(d) for p in polys]
        for a in range(1, a_max + 1):
            scanned += 1
            vals = [a + x for x in g]
            discs = []
            for v in vals:
                if reduce_to_field:
                    try:
                        discs.append(fundamental_discriminant_of(v).value)
                    except ValueError:
                        break
                elif is_fundamental(v):
                    discs.append(v)
                else:
                    break
            else:
                rs = [rank(v) for v in discs]
                if all(r < n for r in rs):
                    return PolyprogResult((a, d), scanned, discs, rs)
    return PolyprogResult(None, scanned)


def verify_polyprog(polys: Sequence[IntegerValuedPolynomial], n: int, a: int, d: int) -> bool:
    for p in polys:
        v = a + p(d)
        if not is_fundamental(v) or three_rank(FundamentalDiscriminant(v)) >= n:
            return False
    return True
