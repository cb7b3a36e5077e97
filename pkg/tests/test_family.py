import pytest
from hypothesis import assume, given, settings, strategies as st

from threerank.arith import CongruenceClass, fundamental_array, is_fundamental, is_squarefree
from threerank.family import (FamilySpec, LinearPolynomial, T_members, count_T, family_from_pairs,
                              format_family, good_pair_failure, image_discriminant, in_T, is_good_pair,
                              normalize, parse_family, single)

x = LinearPolynomial


def test_good_pair_examples():
    assert is_good_pair(1, 4)
    assert not is_good_pair(3, 4)
    assert is_good_pair(12, 16)
    assert is_good_pair(3, 9)
    assert not is_good_pair(9, 3)
    assert not is_good_pair(18, 27)
    assert good_pair_failure(3, 4) == "ii"
    assert good_pair_failure(9, 3) == "i"
    assert good_pair_failure(5, 7) is None
    with pytest.raises(ValueError):
        is_good_pair(0, 4)


def test_normalize_examples():
    f = single(x(1, 3))
    (p,) = f.polys
    assert (f.u, f.B, p.at_one, p.l) == (2, 16, 1, 1)
    assert p.derived_pair == (1, 4)
    f = single(x(1, 5))
    (p,) = f.polys
    assert (f.u, f.B, p.at_one, p.l) == (1, 8, 3, 4)
    assert p.derived_pair == (12, 16)
    fam = normalize(family_from_pairs(1, [(1, 3)], [(1, 1)]))
    assert [p.lam for p in fam.polys] == [1, -1]


good_pairs = st.tuples(st.integers(1, 5000), st.integers(1, 5000)).filter(lambda t: is_good_pair(t[1], t[0]))


@settings(max_examples=1000)
@given(good_pairs, st.sampled_from([1, -1]))
def test_derived_pair_is_good(mn, sign):
    m, n = mn
    fam = single(x(m, n), sign)
    (p,) = fam.polys
    assert is_good_pair(*p.derived_pair)
    assert p.at_one % 2 == 1
    # the sign-aware scale makes the image class a fundamental-discriminant class
    assert (p.lam * p.l_signed * p.at_one) % 4 in (0, 1)


def test_in_T_examples():
    fam = single(x(1, 3))
    assert in_T(17, fam)
    assert not in_T(33, fam)
    assert not in_T(2, fam)
    assert not in_T(2, single(x(1, 5)))


def test_image_examples():
    assert image_discriminant(17, single(x(1, 3)), 0).value == 5
    # literal scale l = 4 would give -28, which is not fundamental
    fam = single(x(1, 5), -1)
    assert fam.polys[0].l == 4
    assert int(fam.polys[0].image(9)) == -7
    with pytest.raises(ValueError):
        image_discriminant(9, fam, 0)  # mu(9) = 0
    assert not is_fundamental(-28)


def test_T_members_match_definition():
    fam = normalize(family_from_pairs(1, [(1, 3)], [(1, 1)]))
    got = T_members(5000, fam).tolist()
    want = [D for D in range(1, 5000) if in_T(D, fam)]
    assert got == want
    assert count_T(5000, fam) == len(want)
    for i in range(2):
        assert T_members(5000, fam, i).tolist() == [D for D in range(1, 5000) if in_T(D, fam, i)]


FAMILIES = [
    family_from_pairs(1, [(1, 3)], []),
    family_from_pairs(1, [], [(1, 5)]),
    family_from_pairs(1, [(1, 3)], [(1, 1)]),
    family_from_pairs(2, [(3, 5), (1, 7)], [(9, 3)]),
    family_from_pairs(2, [(8, 5)], [(5, 2), (3, 1)]),
    family_from_pairs(1, [(25, 5)], []),
]


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: format_family(s).replace("\n", ";"))
def test_images_land_in_the_good_progression(spec):
    fam = normalize(spec)
    for i, p in enumerate(fam.polys):
        res, N = p.image_class
        assert is_good_pair(res, N) or is_good_pair(res % N or N, N)
        for D in T_members(20000, fam, i).tolist():
            E = int(p.image(D))
            if E == 1:
                # D = 1 with f~(1) = 1: the trivial field
                assert D == 1 and p.at_one == 1 and p.lam == 1
                continue
            assert is_fundamental(E) and E % N == res and (E > 0) == (p.lam == 1)


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: format_family(s).replace("\n", ";"))
def test_image_map_is_a_bijection_without_the_squarefree_D_condition(spec):
    # D -> lam l f~(D) is injective and hits every fundamental E of the image
    # class between the images of 1 and X; requiring mu(D) != 0 thins the domain
    fam = normalize(spec)
    X = 20000
    for p in fam.polys:
        mod = 1 << (p.u + 2)
        dom = [D for D in range(1, X, mod) if is_squarefree(abs(p(D)))]
        imgs = [int(p.image(D)) for D in dom if p.image(D) != 1]
        assert len(set(imgs)) == len(imgs)
        res, N = p.image_class
        last = 1 + (X - 2) // mod * mod
        lo, hi = sorted((int(p.image(1)), int(p.image(last))))
        want = {E for E in range(lo, hi + 1) if E % N == res and is_fundamental(E)}
        assert set(imgs) == want


def test_family_invariants():
    with pytest.raises(ValueError):
        FamilySpec(1, tuple(x(1, i) for i in range(1, 7)), ())
    with pytest.raises(ValueError):
        FamilySpec(1, (), ())
    with pytest.raises(ValueError):
        FamilySpec(1, (x(4, 3),), ())
    with pytest.raises(ValueError):
        x(0, 3)


def test_parse_family():
    spec = parse_family("# corollary-like\nn 1\n\n+ 1 3\n- 1 1  # trailing comment\n")
    assert spec.n_rank == 1 and spec.positives == (x(1, 3),) and spec.negatives == (x(1, 1),)
    for bad in ("+ 1 3\n", "n 1\n* 1 3\n", "n 1\n+ 1\n", "n 1\nn 2\n+ 1 3\n", "n 1\n+ a 3\n", "n 1\n+ 4 3\n"):
        with pytest.raises(ValueError):
            parse_family(bad)


@given(st.integers(1, 3), st.lists(good_pairs, max_size=3), st.lists(good_pairs, max_size=2))
def test_format_parse_round_trip(n, pos, neg):
    assume(pos or neg)
    assume(4 + len(pos) + 3 * len(neg) <= 3 ** (n + 1))
    spec = family_from_pairs(n, pos, neg)
    assert parse_family(format_family(spec)) == spec
