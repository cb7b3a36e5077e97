"""Class groups of imaginary quadratic fields via reduced binary quadratic
forms and Gauss composition. This is the ground truth the cubic-form engine
is checked against for D < 0.
"""
from __future__ import annotations

import math
from typing import NamedTuple

from .arith import is_fundamental


class QuadraticForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def inverse(self) -> "QuadraticForm":
        return reduce_form(QuadraticForm(self.a, -self.b, self.c))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def reduce_form(f: QuadraticForm) -> QuadraticForm:
    a, b, c = f
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError(f"{f} is not positive definite")
    while True:
        # bring b into (-a, a]
        if not -a < b <= a:
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return QuadraticForm(a, b, c)


def principal_form(D: int) -> QuadraticForm:
    b = D % 2
    return QuadraticForm(1, b, (b * b - D) // 4)


def compose(f: QuadraticForm, g: QuadraticForm) -> QuadraticForm:
    """Reduced representative of the product class of f and g."""
    D = f.disc
    if g.disc != D:
        raise ValueError(f"discriminant mismatch: {D} vs {g.disc}")
    a1, b1, _ = f
    a2, b2, _ = g
    s = (b1 + b2) // 2
    g1, u, v = _xgcd(a1, a2)
    e, w, z = _xgcd(g1, s)
    x, y = w * u, w * v
    a3 = a1 * a2 // (e * e)
    b3 = (a1 * b2 * x + a2 * b1 * y + z * (b1 * b2 + D) // 2) // e
    b3 %= 2 * a3
    c3 = (b3 * b3 - D) // (4 * a3)
    return reduce_form(QuadraticForm(a3, b3, c3))


def reduced_forms(D: int) -> list[QuadraticForm]:
    """One reduced form per class of discriminant D < 0 (fundamental)."""
    if D >= 0:
        raise ValueError("reduced_forms handles D < 0 only")
    if not is_fundamental(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    out = []
    for a in range(1, math.isqrt(-D // 3) + 1):
        start = -a + 1 if (-a + 1 - D) % 2 == 0 else -a + 2
        for b in range(start, a + 1, 2):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append(QuadraticForm(a, b, c))
    return out


def class_number(D: int) -> int:
    return len(reduced_forms(D))


def three_torsion(D: int) -> list[QuadraticForm]:
    """Classes f with f^3 = 1, found by squaring every class."""
    return [f for f in reduced_forms(D) if compose(f, f) == f.inverse()]


def oracle_three_rank(D: int) -> int:
    n = len(three_torsion(D))
    r = 0
    while n % 3 == 0:
        n //= 3
        r += 1
    if n != 1:
        raise AssertionError(f"3-torsion of D={D} has non-3-power size")
    return r
