"""Tests for the three construction families and their classifier."""

import random

import pytest

from twistedwreath.abelian import FiniteAbelianGroup
from twistedwreath.construct import build, build_case1, build_case2, build_case3, classify
from twistedwreath.errors import InputError
from twistedwreath.intmat import (
    IntMatrix,
    cokernel_order,
    companion_cyclotomic_5,
    direct_sum,
    matrix_order,
)
from twistedwreath.wreath import check_compatibility, random_element


def group(text):
    return FiniteAbelianGroup.parse(text)


def test_classify_examples():
    rep = classify(group("2^1:2,3^1:2,5^1:1"), 3)
    assert rep.applicable_cases == (1,)
    d1, d2, d3 = rep.decisions
    assert d1.applicable and not d2.applicable and not d3.applicable
    assert "p = 2" in d2.reason or "odd" in d2.reason
    assert "multiple of 4" in d3.reason

    rep = classify(group("3^2:1,7^1:1"), 2)
    assert rep.applicable_cases == (2,)
    assert "3^2:1" in rep.decisions[0].reason

    rep = classify(group("2^2:3"), 4)
    assert 3 in rep.applicable_cases


def test_classify_no_case():
    rep = classify(group("2^1:1"), 2)
    assert rep.applicable_cases == ()
    with pytest.raises(InputError):
        build(group("2^1:1"), 2)


def test_classify_monotone_under_large_primes():
    base = group("2^1:2,3^1:2")
    assert classify(base, 3).decisions[0].applicable
    bigger = group("2^1:2,3^1:2,5^1:1,7^2:1,11^1:3")
    assert classify(bigger, 3).decisions[0].applicable


def test_classify_validates_k():
    with pytest.raises(InputError):
        classify(group("2^1:2"), 0)


def test_build_case1_smallest():
    c = build_case1(group("5^1:1"), 1)
    assert c.automorphism.m == IntMatrix.from_rows([(-1,)])
    assert c.automorphism.f.blocks[0].rows == ((2,),)
    assert c.predicted_r == 2
    assert c.block_layout == ("5^1:1 = scalar 2",)


def test_build_case1_f2_f3_split():
    c = build_case1(group("3^1:5"), 2)
    assert c.predicted_r == 4
    assert c.block_layout == ("3^1:5 = F2 + F3",)
    b = c.automorphism.f.blocks[0]
    assert b.k == 5
    assert b.rows[0][:2] == (0, 1)
    assert b.rows[2][2:] == (0, 0, 1)


def test_build_case1_single_f2():
    c = build_case1(group("2^1:2"), 1)
    assert c.block_layout == ("2^1:2 = F2",)
    assert c.predicted_r == 2
    assert c.automorphism.f.blocks[0].rows == ((0, 1), (1, 1))


def test_build_case1_rejects_thin_component():
    with pytest.raises(InputError, match="2\\^1:1"):
        build_case1(group("2^1:1,5^1:1"), 1)
    with pytest.raises(InputError, match="3\\^2:1"):
        build_case1(group("3^2:1"), 2)


def test_build_case2_examples():
    c = build_case2(group("7^1:1"), 2)
    assert c.predicted_r == 3
    assert c.block_layout == ("7^1:1 = scalar 3",)
    assert c.automorphism.m == IntMatrix.from_rows([(0, 1), (-1, -1)])

    c = build_case2(group("3^2:1,5^1:1"), 4)
    assert c.predicted_r == 9
    assert c.block_layout == ("3^2:1 = scalar 2", "5^1:1 = scalar 2")
    assert matrix_order(c.automorphism.m, 10) == 3


def test_build_case2_rejects():
    with pytest.raises(InputError, match="p = 2"):
        build_case2(group("2^1:1"), 2)
    with pytest.raises(InputError, match="even"):
        build_case2(group("3^1:1"), 3)


def test_build_case3_examples():
    c = build_case3(group("2^2:2"), 4)
    assert c.predicted_r == 5
    assert c.block_layout == ("2^2:2 = F2",)
    assert c.automorphism.m == companion_cyclotomic_5()

    c = build_case3(group("3^1:1"), 4)
    assert c.predicted_r == 5
    assert c.block_layout == ("3^1:1 = scalar 2",)

    c = build_case3(group("2^1:3"), 8)
    assert c.predicted_r == 25
    assert c.block_layout == ("2^1:3 = F3",)
    assert c.automorphism.m == direct_sum([companion_cyclotomic_5()] * 2)
    assert matrix_order(c.automorphism.m, 10) == 5


def test_build_case3_rejects():
    with pytest.raises(InputError, match="divisible by 4"):
        build_case3(group("3^1:1"), 6)
    with pytest.raises(InputError, match="2\\^1:1"):
        build_case3(group("2^1:1"), 4)


def test_build_default_lowest_case():
    c = build(group("2^2:3"), 4)
    assert c.case == 1
    c = build(group("2^2:3"), 4, case=3)
    assert c.case == 3
    with pytest.raises(InputError):
        build(group("2^2:3"), 4, case=5)
    # an explicitly requested case must still satisfy its hypothesis
    with pytest.raises(InputError):
        build(group("2^2:3"), 4, case=2)


ALL_CONSTRUCTIONS = [
    ("5^1:1", 1, 1),
    ("2^1:2", 1, 1),
    ("2^2:2,3^1:3,5^1:1", 3, 1),
    ("7^1:1", 2, 2),
    ("3^2:1,5^1:1", 4, 2),
    ("2^2:2", 4, 3),
    ("3^1:1", 4, 3),
    ("2^1:3,3^1:2,7^1:1", 8, 3),
]


@pytest.mark.parametrize("text,k,case", ALL_CONSTRUCTIONS)
def test_constructions_pass_compatibility(text, k, case):
    c = build(group(text), k, case=case)
    assert check_compatibility(c.automorphism.f, c.automorphism.m, 25)


@pytest.mark.parametrize("text,k,case", ALL_CONSTRUCTIONS)
def test_predicted_matches_cokernel(text, k, case):
    c = build(group(text), k, case=case)
    e = IntMatrix.identity(k)
    assert cokernel_order(e - c.automorphism.m) == c.predicted_r


@pytest.mark.parametrize("text,k,case", ALL_CONSTRUCTIONS)
def test_constructions_have_finite_order(text, k, case):
    c = build(group(text), k, case=case)
    phi = c.automorphism
    t_m = matrix_order(phi.m, 16)
    assert t_m is not None
    t_f = phi.f.order(bound=100000)
    n = t_m * t_f
    rng = random.Random(13)
    for _ in range(5):
        g = random_element(rng, c.group, k)
        out = g
        for _ in range(n):
            out = phi.apply(out)
        assert out == g


def test_case_tags_match_builders():
    assert build_case1(group("5^1:1"), 1).case == 1
    assert build_case2(group("3^1:1"), 2).case == 2
    assert build_case3(group("3^1:1"), 4).case == 3
