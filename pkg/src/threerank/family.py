"""Good pairs, family normalization and the sets T(X), T_i(X).

A family is r polynomials f_i(x) = m_i x + n_i whose values are read as
positive discriminants and s more read with a minus sign. Normalization
strips the exact power of 2 from m_i + n_i, picks the modulus B = 2^{u+2}
and the scale l_i making l_i * f~_i(D) a fundamental discriminant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .arith import FundamentalDiscriminant, is_squarefree, squarefree_mask
from .config import DEFAULT


def odd_prime_factors(n: int) -> list[int]:
    n = abs(n)
    while n % 2 == 0 and n:
        n //= 2
    out = []
    p = 3
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 2
    if n > 1:
        out.append(n)
    return out


def good_pair_failure(A: int, B: int) -> str | None:
    """Name of the violated clause ('i' or 'ii'), or None for a good pair."""
    if A < 1 or B < 1:
        raise ValueError(f"good pairs are pairs of positive integers, got ({A}, {B})")
    for p in odd_prime_factors(math.gcd(A, B)):
        if B % (p * p) or A % (p * p) == 0:
            return "i"
    if B % 2 == 0:
        if not ((A % 4 == 1 and B % 4 == 0) or (A % 16 in (8, 12) and B % 16 == 0)):
            return "ii"
    return None


def is_good_pair(A: int, B: int) -> bool:
    return good_pair_failure(A, B) is None


def v2(n: int) -> int:
    return (n & -n).bit_length() - 1


@dataclass(frozen=True)
class LinearPolynomial:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"need positive coefficients, got m={self.m}, n={self.n}")

    def __call__(self, x):
        return self.m * x + self.n

    def __str__(self):
        return f"{self.m}x+{self.n}"


@dataclass(frozen=True)
class FamilySpec:
    n_rank: int
    positives: tuple[LinearPolynomial, ...] = ()
    negatives: tuple[LinearPolynomial, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "positives", tuple(self.positives))
        object.__setattr__(self, "negatives", tuple(self.negatives))
        r, s = self.r, self.s
        if self.n_rank < 1:
            raise ValueError("rank bound n must be >= 1")
        if r + s < 1:
            raise ValueError("a family needs at least one polynomial")
        if 4 + r + 3 * s > 3 ** (self.n_rank + 1):
            raise ValueError(f"4 + r + 3s = {4 + r + 3 * s} exceeds 3^(n+1) = {3 ** (self.n_rank + 1)}")
        for f in self.polys:
            # intercept first, slope second
            clause = good_pair_failure(f.n, f.m)
            if clause:
                raise ValueError(f"pair (n, m) = ({f.n}, {f.m}) of {f} is not good (clause {clause})")

    @property
    def r(self) -> int:
        return len(self.positives)

    @property
    def s(self) -> int:
        return len(self.negatives)

    @property
    def polys(self) -> tuple[LinearPolynomial, ...]:
        return self.positives + self.negatives


def parse_family(text: str) -> FamilySpec:
    """Parse the family text format.

    ``n <rank bound>`` once, then one ``+ m n`` or ``- m n`` per polynomial.
    Blank lines and ``#`` comments are skipped; anything else is an error.
    """
    n_rank = None
    pos, neg = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "n" and len(tok) == 2:
                if n_rank is not None:
                    raise ValueError("duplicate header")
                n_rank = int(tok[1])
            elif tok[0] in "+-" and len(tok[0]) == 1 and len(tok) == 3:
                poly = LinearPolynomial(int(tok[1]), int(tok[2]))
                (pos if tok[0] == "+" else neg).append(poly)
            else:
                raise ValueError(f"unrecognised line {line!r}")
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}") from None
    if n_rank is None:
        raise ValueError("missing header line 'n <rank bound>'")
    return FamilySpec(n_rank, tuple(pos), tuple(neg))


def format_family(spec: FamilySpec) -> str:
    lines = [f"n {spec.n_rank}"]
    lines += [f"+ {f.m} {f.n}" for f in spec.positives]
    lines += [f"- {f.m} {f.n}" for f in spec.negatives]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ReducedPoly:
    """x -> (m x + n) / 2^u together with its sign and scale data."""

    m: int
    n: int
    u: int
    l: int
    lam: int
    # scale that makes lam * l_signed * f~(D) fundamental; equals l when lam = +1
    l_signed: int

    def __call__(self, x):
        num = self.m * x + self.n
        if isinstance(num, np.ndarray):
            assert np.all(num % (1 << self.u) == 0)
            return num >> self.u
        q, rem = divmod(num, 1 << self.u)
        assert rem == 0, f"2^{self.u} does not divide {num}"
        return q

    @property
    def at_one(self) -> int:
        return (self.m + self.n) >> self.u

    @property
    def derived_pair(self) -> tuple[int, int]:
        return self.l * self.at_one, 4 * self.l * self.m

    @property
    def image_class(self) -> tuple[int, int]:
        """(residue, modulus) of the image discriminants lam * l * f~(D)."""
        N = 4 * self.l_signed * self.m
        return (self.lam * self.l_signed * self.at_one) % N, N

    def image(self, D):
        return self.lam * self.l_signed * self(D)


@dataclass(frozen=True)
class NormalizedFamily:
    spec: FamilySpec
    polys: tuple[ReducedPoly, ...]
    u: int
    B: int

    @property
    def n_rank(self) -> int:
        return self.spec.n_rank

    def linear_system(self) -> list[tuple[int, int]]:
        """The polynomials in k with D = B k + 1, as integer (alpha, beta)
        meaning alpha k + beta. The first one is D itself."""
        out = [(self.B, 1)]
        for p in self.polys:
            out.append(((p.m * self.B) >> p.u, p.at_one))
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n_rank,
            "r": self.spec.r,
            "s": self.spec.s,
            "u": self.u,
            "B": self.B,
            "polys": [
                {
                    "m": p.m,
                    "n": p.n,
                    "u_i": p.u,
                    "f_tilde_at_1": p.at_one,
                    "l_i": p.l,
                    "lambda_i": p.lam,
                    "l_image": p.l_signed,
                }
                for p in self.polys
            ],
        }


def normalize(spec: FamilySpec) -> NormalizedFamily:
    us = [v2(f.m + f.n) for f in spec.polys]
    u = max(us)
    B = 1 << (u + 2)
    # lambda table stored per index: the first r are +1, the rest -1
    lams = [1] * spec.r + [-1] * spec.s
    out = []
    for f, ui, lam in zip(spec.polys, us, lams):
        at_one = (f.m + f.n) >> ui
        assert at_one % 2 == 1
        l = 1 if at_one % 4 == 1 else 4
        l_signed = 1 if (lam * at_one) % 4 == 1 else 4
        rp = ReducedPoly(f.m, f.n, ui, l, lam, l_signed)
        A, N = rp.derived_pair
        if not is_good_pair(A, N):
            raise AssertionError(f"derived pair {(A, N)} for {f} is not good")
        out.append(rp)
    return NormalizedFamily(spec, tuple(out), u, B)


def in_T(D: int, fam: NormalizedFamily, which: int | None = None) -> bool:
    """Membership of D in T(X) (which=None) or T_i(X) (which=i, 0-based)."""
    if D < 1:
        return False
    polys = fam.polys if which is None else (fam.polys[which],)
    mod = fam.B if which is None else 1 << (fam.polys[which].u + 2)
    if D % mod != 1 % mod:
        return False
    if not is_squarefree(D):
        return False
    return all(is_squarefree(p(D)) for p in polys)


def image_discriminant(D: int, fam: NormalizedFamily, i: int) -> FundamentalDiscriminant:
    if not in_T(D, fam, i):
        raise ValueError(f"D={D} is not in T_{i}")
    return FundamentalDiscriminant(fam.polys[i].image(D))


def T_segments(X: float, fam: NormalizedFamily, which: int | None = None,
               segment: int | None = None) -> Iterator[np.ndarray]:
    """Yield the members of T(X) (or T_i(X)) in ascending order, by segment."""
    seg = segment or DEFAULT.segment
    polys = fam.polys if which is None else (fam.polys[which],)
    mod = fam.B if which is None else 1 << (fam.polys[which].u + 2)
    kmax = math.ceil((X - 1) / mod)  # D = mod*k + 1 < X
    k0 = 0
    while k0 < kmax:
        k1 = min(kmax, k0 + max(1024, seg // mod))
        D = mod * np.arange(k0, k1, dtype=np.int64) + 1
        keep = _sf(D)
        for p in polys:
            keep &= _sf(p(D))
        yield D[keep]
        k0 = k1


def _sf(values: np.ndarray) -> np.ndarray:
    # values form an arithmetic progression, so a contiguous sieve is cheap
    lo, hi = int(values.min()), int(values.max()) + 1
    return squarefree_mask(lo, hi)[values - lo]


def T_members(X: float, fam: NormalizedFamily, which: int | None = None) -> np.ndarray:
    parts = list(T_segments(X, fam, which))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def count_T(X: float, fam: NormalizedFamily, which: int | None = None) -> int:
    return sum(int(p.size) for p in T_segments(X, fam, which))


def single(poly: LinearPolynomial, sign: int = 1, n_rank: int = 1) -> NormalizedFamily:
    if sign == 1:
        return normalize(FamilySpec(n_rank, (poly,), ()))
    return normalize(FamilySpec(n_rank, (), (poly,)))


def family_from_pairs(n_rank: int, pos: Sequence[tuple[int, int]] = (),
                      neg: Sequence[tuple[int, int]] = ()) -> FamilySpec:
    """FamilySpec from (m, n) coefficient pairs."""
    return FamilySpec(
        n_rank,
        tuple(LinearPolynomial(m, n) for m, n in pos),
        tuple(LinearPolynomial(m, n) for m, n in neg),
    )
