"""Integer arithmetic substrate: Möbius and squarefree sieves, fundamental
discriminants, and the congruence-restricted sets S_lambda(X, m, N).

All sieves are segmented, so memory stays proportional to the segment
length no matter how far the range extends.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .config import DEFAULT


@lru_cache(maxsize=16)
def _primes_cached(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n, ascending."""
    return _primes_cached(int(n))


def _segments(lo: int, hi: int, seg: int) -> Iterator[tuple[int, int]]:
    s = lo
    while s < hi:
        e = min(hi, s + seg)
        yield s, e
        s = e


def mobius_range(lo: int, hi: int, segment: int | None = None) -> np.ndarray:
    """mu(n) for every n in [lo, hi), as an int8 array."""
    if lo < 1:
        raise ValueError(f"mobius_range needs lo >= 1, got {lo}")
    if hi <= lo:
        return np.zeros(0, dtype=np.int8)
    seg = segment or DEFAULT.segment
    base = primes_upto(math.isqrt(hi - 1))
    out = np.empty(hi - lo, dtype=np.int8)
    for s, e in _segments(lo, hi, seg):
        mu = np.ones(e - s, dtype=np.int8)
        rest = np.arange(s, e, dtype=np.int64)
        for p in base.tolist():
            first = -(-s // p) * p
            if first >= e:
                continue
            mu[first - s :: p] *= -1
            rest[first - s :: p] //= p
            q = p * p
            first = -(-s // q) * q
            if first < e:
                mu[first - s :: q] = 0
        # one prime factor above sqrt(hi) may remain
        mu[rest > 1] *= -1
        out[s - lo : e - lo] = mu
    return out


def squarefree_mask(lo: int, hi: int, segment: int | None = None) -> np.ndarray:
    """Boolean mask over [lo, hi): True where n is squarefree.

    0 is not squarefree; negative n are judged by |n| only when the whole
    range is non-negative, so callers pass absolute values.
    """
    if lo < 0:
        raise ValueError("squarefree_mask works on non-negative ranges")
    if hi <= lo:
        return np.zeros(0, dtype=bool)
    seg = segment or DEFAULT.segment
    base = primes_upto(math.isqrt(hi - 1))
    out = np.ones(hi - lo, dtype=bool)
    for s, e in _segments(lo, hi, seg):
        view = out[s - lo : e - lo]
        for p in base.tolist():
            q = p * p
            if q >= e:
                break
            first = -(-s // q) * q
            if first < e:
                view[first - s :: q] = False
    if lo == 0:
        out[0] = False
    return out


def squarefree_lookup(values: np.ndarray) -> np.ndarray:
    """Squarefree test for an array of positive integers (by |value|)."""
    values = np.abs(np.asarray(values, dtype=np.int64))
    if values.size == 0:
        return np.zeros(0, dtype=bool)
    lo, hi = int(values.min()), int(values.max()) + 1
    mask = squarefree_mask(lo, hi)
    return mask[values - lo]


def is_squarefree(n: int) -> bool:
    n = abs(int(n))
    if n == 0:
        return False
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return False
        p += 2
    return True


def squarefree_core(t: int) -> int:
    """The squarefree integer s with t = s * k^2 (sign kept)."""
    if t == 0:
        raise ValueError("0 has no squarefree core")
    sign = -1 if t < 0 else 1
    n = abs(t)
    core = 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            core *= p
        p += 1 if p == 2 else 2
    return sign * core * n


def is_fundamental(d: int) -> bool:
    d = int(d)
    if d in (0, 1):
        return False
    r = d % 4
    if r == 1:
        return is_squarefree(d)
    if r == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


@dataclass(frozen=True, order=True)
class FundamentalDiscriminant:
    value: int

    def __post_init__(self):
        if not is_fundamental(self.value):
            raise ValueError(f"{self.value} is not a fundamental discriminant")

    @property
    def lam(self) -> int:
        return 1 if self.value > 0 else -1

    def __int__(self):
        return self.value


def fundamental_discriminant_of(t: int) -> FundamentalDiscriminant:
    """Discriminant of the quadratic field Q(sqrt t)."""
    t = int(t)
    if t in (0, 1) or (t > 0 and math.isqrt(t) ** 2 == t):
        raise ValueError(f"{t} does not define a quadratic field")
    s = squarefree_core(t)
    return FundamentalDiscriminant(s if s % 4 == 1 else 4 * s)


@dataclass(frozen=True)
class CongruenceClass:
    m: int
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"modulus must be positive, got {self.N}")
        # residue convention: the mathematical residue of the signed D
        object.__setattr__(self, "m", self.m % self.N)

    def contains(self, d) -> bool | np.ndarray:
        return d % self.N == self.m


ALL = CongruenceClass(0, 1)


def fundamental_mask(lo: int, hi: int, lam: int) -> np.ndarray:
    """Mask over t in [lo, hi) (t >= 1): True where lam*t is fundamental."""
    if lam not in (1, -1):
        raise ValueError("lam must be +1 or -1")
    lo = max(lo, 1)
    if hi <= lo:
        return np.zeros(0, dtype=bool)
    t = np.arange(lo, hi, dtype=np.int64)
    sf = squarefree_mask(lo, hi)
    want = 1 if lam == 1 else 3
    out = sf & (t % 4 == want)
    klo, khi = -(-lo // 4), (hi - 1) // 4 + 1
    if khi > klo:
        ks = np.arange(klo, khi, dtype=np.int64)
        ok = squarefree_mask(klo, khi) & np.isin((lam * ks) % 4, (2, 3))
        out[ks[ok] * 4 - lo] = True
    if lam == 1 and lo == 1:
        out[0] = False
    return out


def _abs_bound(X: float) -> int:
    # integers t with t < X
    return math.ceil(X) if X == int(X) else math.floor(X) + 1


def fundamental_segments(X: float, lam: int, segment: int | None = None) -> Iterator[np.ndarray]:
    """Yield fundamental D with 0 < lam*D < X in ascending |D|, segment by segment."""
    seg = segment or DEFAULT.segment
    top = _abs_bound(X)
    for s, e in _segments(1, top, seg):
        t = np.flatnonzero(fundamental_mask(s, e, lam)).astype(np.int64) + s
        yield lam * t


def fundamental_array(X: float, cls: CongruenceClass = ALL, lam: int = 1) -> np.ndarray:
    parts = [d[cls.contains(d)] for d in fundamental_segments(X, lam)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def enumerate_S(X: float, cls: CongruenceClass = ALL, lam: int = 1) -> list[FundamentalDiscriminant]:
    """S_lam(X, m, N), ascending by |D|."""
    return [FundamentalDiscriminant(int(d)) for d in fundamental_array(X, cls, lam)]


def count_S(X: float, cls: CongruenceClass = ALL, lam: int = 1) -> int:
    total = 0
    for d in fundamental_segments(X, lam):
        total += int(np.count_nonzero(cls.contains(d)))
    return total
