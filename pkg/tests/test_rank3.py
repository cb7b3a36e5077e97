import functools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from threerank.arith import fundamental_array, fundamental_discriminant_of, is_fundamental
from threerank.bqf import oracle_three_rank
from threerank.rank3 import (BinaryCubicForm, CoverageError, RankTable, count_table, cubic_class_count,
                             is_reduced, rank_from_count, rank_table, rank_table_interval,
                             reduced_forms_of_disc, three_rank, transform_quadratic)

coef = st.integers(-30, 30)
GENS = [(0, 1, 1, 0), (1, 1, 0, 1), (1, -1, 0, 1), (1, 0, 0, -1)]


def _mul(m, n):
    return (m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3])


unimodular = st.lists(st.sampled_from(GENS), min_size=1, max_size=12).map(
    lambda ws: functools.reduce(_mul, ws))


def test_known_cubic_fields():
    assert cubic_class_count(-23) == 1
    assert cubic_class_count(5) == 0
    assert cubic_class_count(229) == 1
    assert BinaryCubicForm(1, 0, -1, -1).disc == -23
    assert BinaryCubicForm(1, 0, -4, -1).disc == 229


def test_three_rank_examples():
    assert three_rank(-4) == 0
    assert three_rank(-23) == 1
    assert three_rank(-3299) == 2
    assert three_rank(fundamental_discriminant_of(-3299)) == 2
    with pytest.raises(ValueError):
        three_rank(9)


@given(st.tuples(coef, coef, coef, coef), unimodular)
def test_hessian_is_covariant(f, m):
    F = BinaryCubicForm(*f)
    G = F.transform(m)
    assert G.disc == F.disc
    assert G.hessian() == transform_quadratic(F.hessian(), m)
    P, Q, R = F.hessian()
    assert 4 * P * R - Q * Q == 3 * F.disc


@given(st.tuples(coef, coef, coef, coef))
def test_rational_root_detection(f):
    F = BinaryCubicForm(*f)
    if F.a == 0 and F.b == 0 and F.c == 0 and F.d == 0:
        return
    # a root r/s in lowest terms has r | d and s | a
    brute = F.a == 0 or F.d == 0 or any(
        F(sg * r, s) == 0 for s in range(1, abs(F.a) + 1) if F.a % s == 0
        for r in range(1, abs(F.d) + 1) if F.d % r == 0 for sg in (1, -1))
    assert F.has_rational_root() == brute


def _orbit_components(D_values, K=9):
    """Union-find over integer cubic forms with coefficients in [-K, K] and
    discriminant in D_values, joined by GL2(Z) generators."""
    rng = np.arange(-K, K + 1)
    a, b, c, d = (x.ravel() for x in np.meshgrid(rng, rng, rng, rng, indexing="ij"))
    disc = 18 * a * b * c * d + b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d
    keep = np.isin(disc, list(D_values))
    forms = [BinaryCubicForm(*map(int, t)) for t in zip(a[keep], b[keep], c[keep], d[keep])]
    forms = [f for f in forms if not f.has_rational_root()]
    index = {f: i for i, f in enumerate(forms)}
    parent = list(range(len(forms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    gens = [(0, 1, 1, 0), (1, 1, 0, 1), (1, 0, 0, -1), (-1, 0, 0, -1)]
    for f, i in index.items():
        for m in gens:
            j = index.get(f.transform(m))
            if j is not None:
                parent[find(i)] = find(j)
    return forms, find


def test_reduced_forms_are_pairwise_inequivalent():
    Ds = [D for D in range(-400, 400) if is_fundamental(D)]
    forms, find = _orbit_components(set(Ds))
    index = {f: i for i, f in enumerate(forms)}
    for D in Ds:
        reps = reduced_forms_of_disc(D)
        for f in reps:
            assert f.disc == D and is_reduced(f) and not f.has_rational_root()
        roots = {find(index[f]) for f in reps if f in index}
        assert len(roots) == sum(1 for f in reps if f in index), D
        # at this size the box meets every orbit, so its components count the classes
        box_orbits = {find(index[f]) for f in forms if f.disc == D}
        assert box_orbits == roots and len(reps) == len(roots), D


def test_rank_from_count():
    assert [rank_from_count(n) for n in (0, 1, 4, 13, 40)] == [0, 1, 2, 3, 4]
    with pytest.raises(AssertionError):
        rank_from_count(2)


def test_per_disc_against_oracle():
    for D in fundamental_array(3000, lam=-1).tolist():
        assert three_rank(D) == oracle_three_rank(D), D


def test_table_matches_per_disc():
    t = rank_table_interval(-1000, 1000)
    for D, r in t.items():
        assert three_rank(D) == r, D
    assert t.D.tolist() == [D for D in range(-1000, 1001) if is_fundamental(D)]


def test_table_small_example():
    t = rank_table(30, 2)
    assert t.D.tolist() == [-24, -23, -20, -19, -15, -11, -8, -7, -4, -3]
    assert {D: r for D, r in t.items()} == {D: int(D == -23) for D in t.D.tolist()}


def test_empty_table():
    assert len(rank_table(1, 1)) == 0


def test_table_threads_identical():
    a = rank_table_interval(-30000, 30000, threads=1)
    b = rank_table_interval(-30000, 30000, threads=3)
    assert np.array_equal(a.D, b.D) and np.array_equal(a.r3, b.r3)


def test_table_coverage(small_table):
    assert small_table[-3299] == 2
    with pytest.raises(CoverageError):
        small_table.lookup([10**7 + 1])
    with pytest.raises(CoverageError):
        small_table.lookup([9])


def test_table_and_scholz_on_positive_side(small_table):
    for D, r in small_table.items():
        if 0 < D and D % 3:
            d = D if D % 4 == 1 else D // 4
            minus = fundamental_discriminant_of(-3 * d).value
            if abs(minus) < 20000:
                assert r <= small_table[minus] <= r + 1


def test_counts_are_three_power_shaped():
    D, counts = count_table(-5000, 5000)
    m = 2 * counts + 1
    while np.any(m % 3 == 0):
        m = np.where(m % 3 == 0, m // 3, m)
    assert np.all(m == 1)
