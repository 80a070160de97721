"""Tests for finite abelian groups and their block automorphisms."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistedwreath.errors import InputError
from twistedwreath.abelian import (
    FiniteAbelianGroup,
    GAutomorphism,
    GElement,
    choose_m,
    f2_block,
    f3_block,
    fixed_points,
    is_epimorphism,
    is_unit,
    matrix_power_mod,
    nonzero_fixed_point,
)
from twistedwreath.intmat import IntMatrix


def group(text: str) -> FiniteAbelianGroup:
    return FiniteAbelianGroup.parse(text)


def random_automorphism(rng: random.Random, g: FiniteAbelianGroup) -> GAutomorphism:
    blocks = []
    for c in g.components:
        while True:
            m = IntMatrix.from_rows(
                [[rng.randrange(c.q) for _ in range(c.d)] for _ in range(c.d)]
            )
            if m.det() % c.p != 0:
                blocks.append(m)
                break
    return GAutomorphism.from_blocks(g, blocks)


def test_parse_format_round_trip():
    g = group("2^2:2,3^1:1")
    assert g.format() == "2^2:2,3^1:1"
    assert [(c.p, c.r, c.d) for c in g.components] == [(2, 2, 2), (3, 1, 1)]
    assert g.order == 16 * 3


def test_parse_canonicalizes():
    assert group("3^1:1,2^2:2").format() == "2^2:2,3^1:1"
    assert group("2^1:1,2^1:2").format() == "2^1:3"
    assert FiniteAbelianGroup.of([(5, 1, 1), (5, 1, 2)]).format() == "5^1:3"


def test_parse_rejects_garbage():
    for bad in ["", "2", "2^2", "2^2:", "4^1:1", "2^0:1", "2^1:0", "2^40:1", "a^1:1"]:
        with pytest.raises(InputError):
            group(bad)


def test_trivial_group_programmatic_only():
    triv = FiniteAbelianGroup(())
    assert triv.order == 1
    assert triv.zero().is_zero()
    assert list(triv.elements()) == [triv.zero()]


def test_order_exponent_moduli():
    g = group("2^2:2,3^1:1,5^1:2")
    assert g.order == 4 * 4 * 3 * 25
    assert g.exponent == 60
    assert g.coord_moduli() == (4, 4, 3, 5, 5)


def test_element_arithmetic():
    g = group("2^2:2,3^1:1")
    a = g.element([(3, 1), (2,)])
    b = g.element([(2, 3), (2,)])
    assert (a + b).coords == ((1, 0), (1,))
    assert (-a).coords == ((1, 3), (1,))
    assert (a - a).is_zero()
    assert a.flat() == (3, 1, 2)
    assert g.element_from_flat((3, 1, 2)) == a
    assert g.element([(7, -1), (5,)]) == g.element([(3, 3), (2,)])


def test_element_validation():
    g = group("2^2:2")
    with pytest.raises(InputError):
        GElement(g, ((4, 0),))
    with pytest.raises(InputError):
        GElement(g, ((0,),))
    with pytest.raises(InputError):
        g.element([(0, 0), (0,)])


def test_is_unit():
    assert is_unit(2, 9, 3)
    assert not is_unit(3, 9, 3)
    assert not is_unit(6, 9, 3)
    assert is_unit(5, 8, 2)
    assert not is_unit(4, 8, 2)
    with pytest.raises(InputError):
        is_unit(1, 10, 3)


def test_f_blocks():
    assert f2_block(4).rows == ((0, 1), (1, 1))
    assert f3_block(9).rows == ((0, 0, 1), (0, 1, 1), (1, 1, 1))
    assert f2_block(2).det() % 2 == 1
    assert f3_block(2).det() % 2 == 1


def test_is_epimorphism():
    g = group("2^1:2")
    assert is_epimorphism(g, [f2_block(2)])
    assert not is_epimorphism(g, [IntMatrix.from_rows([(0, 0), (0, 0)])])
    assert not is_epimorphism(g, [IntMatrix.from_rows([(2, 0), (0, 1)])])
    g3 = group("3^1:2")
    assert is_epimorphism(g3, [IntMatrix.from_rows([(2, 0), (0, 1)])])
    with pytest.raises(InputError):
        is_epimorphism(g, [])


def test_automorphism_validation():
    g = group("2^1:2")
    with pytest.raises(InputError):
        GAutomorphism.from_blocks(g, [IntMatrix.from_rows([(2, 0), (0, 1)])])
    with pytest.raises(InputError):
        GAutomorphism(g, (IntMatrix.from_rows([(3, 0), (0, 1)]),))  # unreduced entry


def test_apply_and_compose():
    g = group("5^1:2")
    f = GAutomorphism.from_blocks(g, [IntMatrix.from_rows([(1, 2), (3, 4)])])
    x = g.element([(1, 1)])
    assert f.apply(x).coords == ((3, 2),)
    h = GAutomorphism.scalar(g, 2)
    assert (f @ h).apply(x) == f.apply(h.apply(x))
    assert (h @ f).apply(x) == h.apply(f.apply(x))


def test_power_and_inverse():
    rng = random.Random(11)
    g = group("2^2:2,3^1:2")
    for _ in range(20):
        f = random_automorphism(rng, g)
        assert f.power(3).blocks == (f @ f @ f).blocks
        assert f.power(0).is_identity()
        finv = f.inverse()
        assert (f @ finv).is_identity()
        assert (finv @ f).is_identity()
        assert f.power(-2).blocks == (finv @ finv).blocks


def test_matrix_power_mod_alias():
    g = group("7^1:1")
    f = GAutomorphism.scalar(g, 3)
    assert matrix_power_mod(f, 6).is_identity()
    assert not matrix_power_mod(f, 3).is_identity()


def test_automorphism_order():
    g = group("7^1:1")
    assert GAutomorphism.scalar(g, 3).order() == 6
    assert GAutomorphism.identity(g).order() == 1
    gf = group("2^1:2")
    f = GAutomorphism.from_blocks(gf, [f2_block(2)])
    assert f.order() == 3  # [[0,1],[1,1]] has order 3 mod 2


def test_fixed_points_f2_mod2_trivial():
    g = group("2^1:2")
    f = GAutomorphism.from_blocks(g, [f2_block(2)])
    pts = fixed_points(f)
    assert len(pts) == 1
    assert pts[0].is_zero()
    assert nonzero_fixed_point(f) is None


def test_fixed_points_identity():
    g = group("3^1:1")
    pts = fixed_points(GAutomorphism.identity(g))
    assert len(pts) == 3
    nz = nonzero_fixed_point(GAutomorphism.identity(g))
    assert nz is not None and not nz.is_zero()


def brute_fixed(f: GAutomorphism) -> set:
    return {g for g in f.group.elements() if f.apply(g) == g}


def test_fixed_points_cross_check():
    rng = random.Random(42)
    for text in ["2^1:2", "3^1:2", "2^2:1,3^1:1", "5^1:1", "2^1:1,2^2:1"]:
        g = group(text)
        for _ in range(8):
            f = random_automorphism(rng, g)
            got = set(fixed_points(f))
            want = brute_fixed(f)
            assert got == want
            nz = nonzero_fixed_point(f)
            nonzero_want = {x for x in want if not x.is_zero()}
            if nonzero_want:
                assert nz in nonzero_want
            else:
                assert nz is None


def test_fixed_points_sorted_deterministic():
    g = group("3^1:2")
    pts = fixed_points(GAutomorphism.identity(g))
    assert list(pts) == sorted(pts, key=lambda e: e.coords)
    assert len(pts) == 9


def test_choose_m_table():
    assert choose_m(7, 1, 3) == 3
    assert choose_m(5, 1, 2) == 2
    assert choose_m(5, 2, 2) == 2
    assert choose_m(3, 1, 2) is None
    assert choose_m(2, 1, 1) is None
    assert choose_m(2, 3, 2) is None
    assert choose_m(11, 1, 2) == 2
    assert choose_m(3, 1, 3) == 2


def test_choose_m_contract():
    for p, r, e in [(5, 1, 2), (7, 1, 3), (7, 2, 3), (11, 1, 3), (13, 2, 2)]:
        m = choose_m(p, r, e)
        assert m is not None
        q = p**r
        assert is_unit(pow(m, e, q), q, p)
        assert is_unit(1 - pow(m, e, q), q, p)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_apply_is_homomorphism(data):
    g = group("2^2:1,3^1:2")
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    f = random_automorphism(rng, g)
    mods = g.coord_moduli()
    a = g.element_from_flat([data.draw(st.integers(0, q - 1)) for q in mods])
    b = g.element_from_flat([data.draw(st.integers(0, q - 1)) for q in mods])
    assert f.apply(a + b) == f.apply(a) + f.apply(b)
    assert f.apply(-a) == -f.apply(a)
