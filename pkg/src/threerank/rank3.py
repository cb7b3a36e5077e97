"""3-ranks of quadratic class groups from binary cubic forms.

For a fundamental discriminant D the number N(D) of GL2(Z)-classes of
irreducible integral binary cubic forms of discriminant D equals the number
of cubic fields of discriminant D, and 3^{r3(D)} = 2 N(D) + 1.

Each class is represented by exactly one reduced form:

* D > 0: the Hessian H = (P, Q, R) = (b^2-3ac, bc-9ad, c^2-3bd) is positive
  definite. F is reduced when |Q| <= P <= R, a > 0, and F is the
  lexicographically largest form among those in its class whose Hessian
  also lies in that domain.
* D < 0: F = (x - theta y) Phi(x, y) with theta the real root and Phi a
  positive definite (irrational) quadratic form. F is reduced when Phi is
  reduced, which for irreducible F reads, with a > 0,

      (a-b)^2 + c(a-b) + ad > 0,  (a+b)^2 + c(a+b) - ad > 0,
      d^2 - bd + ac - a^2 > 0,

  all strict, plus b > 0 or (b = 0 and d > 0) to pick one of the two
  mirror images (a, b, c, d) ~ (a, -b, c, -d).

Coefficient bounds (derived from the syzygy G^2 + 27 D F^2 = 4 H^3 and
|D| = Phi(theta)^2 |disc Phi|):

* D > 0: 729 a^4 <= 16 D, b^2 - 3ab + 9a^2 <= P <= sqrt(D), c <= b - 3a.
* D < 0: 27 a^4 <= 16 |D|, |theta| bounded by 3a^4 (theta^2-|theta|+1)^2
  <= |D|, -b < c < C_max + b.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .arith import FundamentalDiscriminant, fundamental_mask, is_fundamental
from .config import DEFAULT


class BinaryCubicForm(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    @property
    def disc(self) -> int:
        a, b, c, d = self
        return 18 * a * b * c * d + b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d

    def hessian(self) -> tuple[int, int, int]:
        a, b, c, d = self
        return b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d

    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), math.gcd(self.c, self.d))

    def __call__(self, x: int, y: int) -> int:
        a, b, c, d = self
        return a * x**3 + b * x * x * y + c * x * y * y + d * y**3

    def transform(self, m: Sequence[int]) -> "BinaryCubicForm":
        """F((x, y) -> (p x + q y, r x + s y)) for m = (p, q, r, s)."""
        a, b, c, d = self
        p, q, r, s = m
        return BinaryCubicForm(
            a * p**3 + b * p * p * r + c * p * r * r + d * r**3,
            3 * a * p * p * q + b * (p * p * s + 2 * p * q * r) + c * (q * r * r + 2 * p * r * s) + 3 * d * r * r * s,
            3 * a * p * q * q + b * (q * q * r + 2 * p * q * s) + c * (p * s * s + 2 * q * r * s) + 3 * d * r * s * s,
            a * q**3 + b * q * q * s + c * q * s * s + d * s**3,
        )

    def has_rational_root(self) -> bool:
        """True when F has a linear factor over Q."""
        a, b, c, d = self
        if a == 0 or d == 0:
            return True
        roots = np.roots([a, b, c, d])
        for z in roots:
            if abs(z.imag) > 1e-6 * (1 + abs(z)):
                continue
            for s in _divisors(abs(a)):
                r0 = round(z.real * s)
                for r in (r0 - 1, r0, r0 + 1):
                    if self(r, s) == 0:
                        return True
        return False


def transform_quadratic(h: Sequence[int], m: Sequence[int]) -> tuple[int, int, int]:
    P, Q, R = h
    p, q, r, s = m
    return (
        P * p * p + Q * p * r + R * r * r,
        2 * P * p * q + Q * (p * s + q * r) + 2 * R * r * s,
        P * q * q + Q * q * s + R * s * s,
    )


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(k for k in range(1, n + 1) if n % k == 0)


# 2x2 integer matrices with entries in {-1, 0, 1} and determinant +-1; every
# GL2(Z) move between two Gauss-reduced definite forms is among these.
_SMALL = tuple(
    m for m in itertools.product((-1, 0, 1), repeat=4) if abs(m[0] * m[3] - m[1] * m[2]) == 1
)


def _in_domain(h) -> bool:
    P, Q, R = h
    return abs(Q) <= P <= R


def _canonical_pos(f: BinaryCubicForm) -> BinaryCubicForm:
    h = f.hessian()
    return max(f.transform(m) for m in _SMALL if _in_domain(transform_quadratic(h, m)))


def is_reduced(f: BinaryCubicForm) -> bool:
    """Reduced-representative test, for either sign of the discriminant."""
    a, b, c, d = f
    if a <= 0 or b < 0:
        return False
    D = f.disc
    if D > 0:
        P, Q, R = f.hessian()
        if not abs(Q) <= P <= R:
            return False
        if abs(Q) < P < R:
            return b > 0 or d > 0
        return f == _canonical_pos(f)
    if D < 0:
        return (
            (a - b) ** 2 + c * (a - b) + a * d > 0
            and (a + b) ** 2 + c * (a + b) - a * d > 0
            and d * d - b * d + a * c - a * a > 0
            and (b > 0 or d > 0)
        )
    return False


# ---------------------------------------------------------------- bounds


def _amax_pos(X: int) -> int:
    a = 0
    while 729 * (a + 1) ** 4 <= 16 * X:
        a += 1
    return a


def _amax_neg(X: int) -> int:
    a = 0
    while 27 * (a + 1) ** 4 <= 16 * X:
        a += 1
    return a


def _bmax_pos(a: int, pmax: int) -> int:
    disc = 4 * pmax - 27 * a * a
    if disc < 0:
        return -1
    return (3 * a + math.isqrt(disc)) // 2 + 1


def _bmax_neg(a: int, X: int) -> int:
    s = math.sqrt(X / 3.0) / (a * a)
    if 4 * s - 3 < 0:
        return -1
    theta = (1 + math.sqrt(4 * s - 3)) / 2
    return int(a * (1 + theta)) + 1


def _crange_neg(a: int, b: int, X: int) -> range:
    cmax = (a * a + (16.0 * a * a * X) ** (1 / 3)) / (4 * a)
    lo = max(-b, -((a * a + b * b) // a) - 1)
    return range(lo, int(cmax + b) + 2)


def _crange_pos(a: int, b: int, pmax: int) -> range:
    lo = -((pmax - b * b) // (3 * a))  # ceil((b^2 - pmax) / 3a)
    return range(lo, b - 3 * a + 1)


# ---------------------------------------------------------- per-D mode


def _solve_d(a: int, b: int, c: int, D: int) -> list[int]:
    # disc is -27 a^2 d^2 + beta d + gamma
    beta = 18 * a * b * c - 4 * b**3
    gamma = b * b * c * c - 4 * a * c**3
    A = 27 * a * a
    rad = beta * beta - 4 * A * (D - gamma)
    if rad < 0:
        return []
    s = math.isqrt(rad)
    if s * s != rad:
        return []
    out = []
    for num in {beta + s, beta - s}:
        if num % (2 * A) == 0:
            out.append(num // (2 * A))
    return out


def reduced_forms_of_disc(D: int) -> list[BinaryCubicForm]:
    """Reduced irreducible forms of discriminant exactly D, one per class."""
    out = []
    if D > 0:
        pmax = math.isqrt(D)
        for a in range(1, _amax_pos(D) + 1):
            for b in range(0, _bmax_pos(a, pmax) + 1):
                for c in _crange_pos(a, b, pmax):
                    for d in _solve_d(a, b, c, D):
                        f = BinaryCubicForm(a, b, c, d)
                        if is_reduced(f) and not f.has_rational_root():
                            out.append(f)
    elif D < 0:
        X = -D
        for a in range(1, _amax_neg(X) + 1):
            for b in range(0, _bmax_neg(a, X) + 1):
                for c in _crange_neg(a, b, X):
                    for d in _solve_d(a, b, c, D):
                        f = BinaryCubicForm(a, b, c, d)
                        if is_reduced(f) and not f.has_rational_root():
                            out.append(f)
    return sorted(out)


def _as_fundamental(D) -> int:
    if isinstance(D, FundamentalDiscriminant):
        return D.value
    D = int(D)
    if not is_fundamental(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    return D


def cubic_class_count(D) -> int:
    """Number of cubic fields (= classes of irreducible cubic forms) of discriminant D."""
    D = _as_fundamental(D)
    forms = reduced_forms_of_disc(D)
    for f in forms:
        assert f.content() == 1, f"imprimitive form {f} at fundamental D={D}"
    return len(forms)


def rank_from_count(n: int) -> int:
    m = 2 * n + 1
    r = 0
    while m % 3 == 0:
        m //= 3
        r += 1
    if m != 1:
        raise AssertionError(f"2*{n}+1 is not a power of 3")
    return r


def three_rank(D) -> int:
    return rank_from_count(cubic_class_count(D))


# --------------------------------------------------------- table mode


_FUND: dict[tuple[int, int], np.ndarray] = {}


def _fund_lookup(X: int, lam: int) -> np.ndarray:
    # mask over t = |D| in [0, X)
    key = (X, lam)
    if key not in _FUND:
        m = np.zeros(X, dtype=bool)
        m[1:] = fundamental_mask(1, X, lam)
        _FUND[key] = m
    return _FUND[key]


def _irreducible_mask_neg(a: int, b: int, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    # the real root lies in (-1 - b/a, 1 - b/a): try every r/s there with s | a
    hit = np.zeros(c.shape, dtype=bool)
    for s in _divisors(a):
        lo = math.floor(-s - b * s / a)
        hi = math.ceil(s - b * s / a)
        for r in range(lo, hi + 1):
            hit |= a * r**3 + b * r * r * s + c * r * s * s + d * s**3 == 0
    return ~hit


def _irreducible_mask_pos(a: int, b: int, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    n = c.size
    if n == 0:
        return np.zeros(0, dtype=bool)
    comp = np.zeros((n, 3, 3))
    comp[:, 0, 0] = -b / a
    comp[:, 0, 1] = -c / a
    comp[:, 0, 2] = -d / a
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    roots = np.linalg.eigvals(comp).real
    ok = np.ones(n, dtype=bool)
    for s in _divisors(a):
        rs = np.rint(roots * s)
        for shift in (-1.0, 0.0, 1.0):
            r = rs + shift
            val = a * r**3 + b * r * r * s + c[:, None] * r * s * s + d[:, None] * float(s) ** 3
            scale = np.abs(a * r**3) + np.abs(b * r * r * s) + np.abs(c[:, None] * r * s * s) + np.abs(d[:, None]) * s**3
            cand = np.abs(val) <= 1e-9 * scale + 0.5
            for i, j in zip(*np.nonzero(cand)):
                if BinaryCubicForm(a, b, int(c[i]), int(d[i]))(int(r[i, j]), s) == 0:
                    ok[i] = False
    return ok


def _band_neg(a: int, b: int, X: int, lo: int) -> np.ndarray:
    """|D| of reduced irreducible forms (a, b, *, *) with lo <= |D| < X, D < 0 fundamental."""
    fund = _fund_lookup(X, -1)
    cs, ds = [], []
    for c in _crange_neg(a, b, X):
        dlo = -(((a - b) ** 2 + c * (a - b)) // a)  # strict lower bound + 1 handled below
        dhi = ((a + b) ** 2 + c * (a + b)) // a + 1
        beta = 18 * a * b * c - 4 * b**3
        gamma = b * b * c * c - 4 * a * c**3
        rad = beta * beta + 108 * a * a * (gamma + X)
        if rad < 0:
            continue
        sq = math.isqrt(rad) + 1
        dlo = max(dlo - 1, (beta - sq) // (54 * a * a) - 1)
        dhi = min(dhi, (beta + sq) // (54 * a * a) + 2)
        if dhi <= dlo:
            continue
        d = np.arange(dlo, dhi, dtype=np.int64)
        keep = ((a - b) ** 2 + c * (a - b) + a * d > 0) & ((a + b) ** 2 + c * (a + b) - a * d > 0)
        keep &= d * d - b * d + a * c - a * a > 0
        if b == 0:
            keep &= d > 0
        d = d[keep]
        if d.size == 0:
            continue
        disc = -27 * a * a * d * d + beta * d + gamma
        keep = (disc < 0) & (disc > -X) & (disc <= -lo)
        d = d[keep]
        disc = disc[keep]
        keep = fund[-disc]
        if not keep.any():
            continue
        cs.append(np.full(int(keep.sum()), c, dtype=np.int64))
        ds.append(d[keep])
    if not cs:
        return np.zeros(0, dtype=np.int64)
    c = np.concatenate(cs)
    d = np.concatenate(ds)
    keep = _irreducible_mask_neg(a, b, c, d)
    c, d = c[keep], d[keep]
    content = np.gcd(np.gcd(a, b), np.gcd(c, d))
    assert np.all(content == 1), "imprimitive form at a fundamental discriminant"
    disc = -27 * a * a * d * d + (18 * a * b * c - 4 * b**3) * d + b * b * c * c - 4 * a * c**3
    return -disc


def _band_pos(a: int, b: int, X: int, lo: int) -> np.ndarray:
    """D of reduced irreducible forms (a, b, *, *) with lo <= D < X, D > 0 fundamental."""
    fund = _fund_lookup(X, 1)
    pmax = math.isqrt(X - 1)
    rows = []
    for c in _crange_pos(a, b, pmax):
        P = b * b - 3 * a * c
        if P <= 0 or P > pmax:
            continue
        dlo = -((P - b * c) // (9 * a))  # ceil((bc - P) / 9a)
        dhi = (b * c + P) // (9 * a)
        if dhi < dlo:
            continue
        d = np.arange(dlo, dhi + 1, dtype=np.int64)
        Q = b * c - 9 * a * d
        R = c * c - 3 * b * d
        keep = (np.abs(Q) <= P) & (P <= R) & (d != 0)
        d, Q, R = d[keep], Q[keep], R[keep]
        disc = (4 * P * R - Q * Q) // 3
        keep = (disc >= lo) & (disc < X) & (disc > 0)
        d, Q, R, disc = d[keep], Q[keep], R[keep], disc[keep]
        keep = fund[disc]
        d, Q, R, disc = d[keep], Q[keep], R[keep], disc[keep]
        interior = (np.abs(Q) < P) & (P < R)
        accept = interior & ((b > 0) | (d > 0))
        for i in np.flatnonzero(~interior):
            f = BinaryCubicForm(a, b, c, int(d[i]))
            accept[i] = f == _canonical_pos(f)
        d = d[accept]
        if d.size:
            rows.append(np.stack([np.full(d.size, c, dtype=np.int64), d]))
    if not rows:
        return np.zeros(0, dtype=np.int64)
    c, d = np.concatenate(rows, axis=1)
    keep = _irreducible_mask_pos(a, b, c, d)
    c, d = c[keep], d[keep]
    content = np.gcd(np.gcd(a, b), np.gcd(c, d))
    assert np.all(content == 1), "imprimitive form at a fundamental discriminant"
    return 18 * a * b * c * d + b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d


def _tasks(lam: int, X: int) -> list[tuple[int, int, int]]:
    out = []
    if X <= 1:
        return out
    if lam == 1:
        pmax = math.isqrt(X - 1)
        for a in range(1, _amax_pos(X) + 1):
            out += [(1, a, b) for b in range(0, _bmax_pos(a, pmax) + 1)]
    else:
        for a in range(1, _amax_neg(X) + 1):
            out += [(-1, a, b) for b in range(0, _bmax_neg(a, X) + 1)]
    return out


def _run_chunk(args) -> tuple[np.ndarray, np.ndarray]:
    chunk, Xneg, Xpos, lo_neg, lo_pos = args
    neg = np.zeros(Xneg, dtype=np.int64)
    pos = np.zeros(Xpos, dtype=np.int64)
    for lam, a, b in chunk:
        if lam == 1:
            np.add.at(pos, _band_pos(a, b, Xpos, lo_pos), 1)
        else:
            np.add.at(neg, _band_neg(a, b, Xneg, lo_neg), 1)
    return neg, pos


def count_table(lo: int, hi: int, threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Cubic class counts for every fundamental D in [lo, hi].

    Returns (D, counts), D ascending. Work is sharded by leading-coefficient
    band (a, b); counts are integer sums, so the merge is order independent.
    """
    if hi < lo:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    Xneg = max(-lo + 1, 0) if lo < 0 else 0
    Xpos = hi + 1 if hi > 0 else 0
    lo_neg = max(-hi, 1) if hi < 0 else 1
    lo_pos = max(lo, 1)
    tasks = _tasks(-1, Xneg) + _tasks(1, Xpos)
    nchunks = max(1, min(len(tasks), 4 * threads))
    chunks = [(tasks[i::nchunks], Xneg, Xpos, lo_neg, lo_pos) for i in range(nchunks)]
    neg = np.zeros(Xneg, dtype=np.int64)
    pos = np.zeros(Xpos, dtype=np.int64)
    if threads > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_chunk, chunks))
    else:
        results = [_run_chunk(ch) for ch in chunks]
    for n_, p_ in results:
        neg += n_
        pos += p_
    Ds, Cs = [], []
    if Xneg > lo_neg:
        t = np.arange(Xneg - 1, lo_neg - 1, -1, dtype=np.int64)
        m = _fund_lookup(Xneg, -1)[t]
        Ds.append(-t[m])
        Cs.append(neg[t[m]])
    if Xpos > lo_pos:
        t = np.arange(lo_pos, Xpos, dtype=np.int64)
        m = _fund_lookup(Xpos, 1)[t]
        Ds.append(t[m])
        Cs.append(pos[t[m]])
    if not Ds:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(Ds), np.concatenate(Cs)


def ranks_from_counts(counts: np.ndarray) -> np.ndarray:
    m = 2 * counts + 1
    r = np.rint(np.log(m) / np.log(3)).astype(np.int64)
    bad = 3**r != m
    if bad.any():
        raise AssertionError(f"class counts {counts[bad][:5]} give non-3-power 2N+1")
    return r.astype(np.int8)


class CoverageError(KeyError):
    """A rank table was asked for a discriminant outside its coverage."""


@dataclass
class RankTable:
    """r3(D) for every fundamental D inside the covered closed intervals."""

    D: np.ndarray
    r3: np.ndarray
    intervals: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.D = np.asarray(self.D, dtype=np.int64)
        self.r3 = np.asarray(self.r3, dtype=np.int8)

    def __len__(self):
        return int(self.D.size)

    def covers(self, lo: int, hi: int) -> bool:
        return any(a <= lo and hi <= b for a, b in self.intervals)

    def _covered(self, v: np.ndarray) -> np.ndarray:
        ok = np.zeros(v.shape, dtype=bool)
        for a, b in self.intervals:
            ok |= (v >= a) & (v <= b)
        return ok

    def covers_all(self, values) -> bool:
        v = np.asarray(values, dtype=np.int64)
        return bool(self._covered(v).all())

    def lookup(self, values) -> np.ndarray:
        """r3 for each value; values must be fundamental and covered."""
        v = np.asarray(values, dtype=np.int64)
        if not self.covers_all(v):
            missing = v[~self._covered(v)]
            raise CoverageError(f"rank table does not cover {missing[:5].tolist()}")
        idx = np.searchsorted(self.D, v)
        idx = np.clip(idx, 0, max(self.D.size - 1, 0))
        if self.D.size == 0 or not np.all(self.D[idx] == v):
            raise CoverageError("requested value is not a tabulated fundamental discriminant")
        return self.r3[idx]

    def __getitem__(self, D: int) -> int:
        return int(self.lookup([int(D)])[0])

    def items(self):
        return zip(self.D.tolist(), self.r3.tolist())


def rank_table_interval(lo: int, hi: int, threads: int = 1, max_range: int | None = None) -> RankTable:
    """RankTable for all fundamental D with lo <= D <= hi."""
    limit = max_range or DEFAULT.max_table_range
    if hi - lo + 1 > limit:
        raise ValueError(f"range of {hi - lo + 1} exceeds the configured maximum {limit}")
    D, counts = count_table(lo, hi, threads)
    r = ranks_from_counts(counts)
    order = np.argsort(D, kind="stable")
    return RankTable(D[order], r[order], [(lo, hi)] if hi >= lo else [])


def rank_table(Xneg: float, Xpos: float, threads: int = 1, max_range: int | None = None) -> RankTable:
    """All fundamental D with -Xneg < D < Xpos."""
    lo = -(math.ceil(Xneg) - 1)
    hi = math.ceil(Xpos) - 1
    if lo > hi:
        return RankTable(np.zeros(0), np.zeros(0), [])
    return rank_table_interval(lo, hi, threads, max_range)
