import math

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from selfclose.abgroup import (
    INFINITE,
    TRIVIAL,
    Z,
    FgAbGroup,
    GroupSyntaxError,
    PrimaryComponent,
    cokernel,
    cyclic,
    direct_sum,
    elementary_divisors,
    format_group,
    from_cyclic_orders,
    group_of,
    has_common_direct_factor,
    hom_group,
    order,
    parse_group,
    primary_decomposition,
    smith_normal_form,
    snf_diagonal,
    ulm_kaplansky,
)
from selfclose.oracle import (
    abelian_groups_of_order,
    count_homs,
    isomorphic,
    order_census,
    p_groups,
    ulm_kaplansky_by_definition,
)


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


# -- canonical form ------------------------------------------------------------


def test_invariant_factors_of_six_plus_four():
    G = from_cyclic_orders(0, [6, 4])
    assert G.invariant_factors == (2, 12)
    assert isomorphic([6, 4], [2, 12])
    assert not isomorphic([6, 4], [24])


def test_coprime_orders_merge():
    assert from_cyclic_orders(0, [5, 7]) == cyclic(35)
    assert isomorphic([5, 7], [35])


def test_constructor_rejects_bad_factors():
    with pytest.raises(ValueError):
        FgAbGroup(0, (1,))
    with pytest.raises(ValueError):
        FgAbGroup(0, (4, 6))
    with pytest.raises(ValueError):
        FgAbGroup(-1)


def test_trivial_and_free():
    assert TRIVIAL.is_trivial and TRIVIAL.is_finite and TRIVIAL.is_cyclic
    assert cyclic(1) == TRIVIAL and cyclic(0) == Z
    assert order(Z) == INFINITE and order(TRIVIAL) == 1
    assert order(from_cyclic_orders(0, [2, 4, 3])) == 24
    assert group_of((0, 1, 6, 4)) == FgAbGroup(1, (2, 12))


def test_primary_decomposition_of_twelve():
    comps = primary_decomposition(cyclic(12))
    assert comps == [PrimaryComponent(2, (2,)), PrimaryComponent(3, (1,))]
    # element orders of Z/12 against Z/4 + Z/3
    assert order_census([12]) == order_census([4, 3])


def test_direct_sum():
    assert direct_sum([cyclic(2), cyclic(3)]) == cyclic(6)
    assert direct_sum([cyclic(2), cyclic(2)]).invariant_factors == (2, 2)
    assert direct_sum([Z, cyclic(4), Z]) == FgAbGroup(2, (4,))


def test_hom_group_example():
    assert hom_group(cyclic(4), cyclic(6)) == cyclic(2)
    assert count_homs([4], [6]) == 2
    assert hom_group(Z, Z) == Z
    assert hom_group(cyclic(2), Z) == TRIVIAL
    assert hom_group(Z, cyclic(3)) == cyclic(3)


def test_ulm_kaplansky_examples():
    C = PrimaryComponent(2, (1, 3))
    assert [ulm_kaplansky(C, s) for s in range(3)] == [1, 0, 1]
    assert [ulm_kaplansky_by_definition(C, s) for s in range(3)] == [1, 0, 1]
    D = PrimaryComponent(2, (1, 1))
    assert ulm_kaplansky(D, 0) == 2 == ulm_kaplansky_by_definition(D, 0)
    with pytest.raises(ValueError):
        ulm_kaplansky(C, -1)


def test_common_direct_factor_examples():
    assert not has_common_direct_factor(cyclic(6), cyclic(4))
    assert has_common_direct_factor(parse_group("Z/2+Z/8"), parse_group("Z/8+Z/9"))
    assert not has_common_direct_factor(cyclic(4), TRIVIAL)
    assert has_common_direct_factor(Z, parse_group("Z+Z/2"))
    assert elementary_divisors(cyclic(12)) == [(2, 2), (3, 1)]


# -- Smith normal form -----------------------------------------------------------


def test_snf_examples():
    U, D, V = smith_normal_form([[2, 4], [6, 8]])
    assert D == [[2, 0], [0, 4]]
    assert matmul(matmul(U, [[2, 4], [6, 8]]), V) == D
    assert snf_diagonal([[4, 6]]) == [2]
    _, D, _ = smith_normal_form([[4, 6]])
    assert D == [[2, 0]]


def test_cokernel():
    assert cokernel([[2, 0], [0, 3]]) == cyclic(6)
    assert cokernel([[2]], rows=2) == FgAbGroup(1, (2,))
    assert cokernel([], rows=0) == TRIVIAL


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-20, 20), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@given(matrices)
@settings(max_examples=300, deadline=None)
def test_snf_properties(A):
    U, D, V = smith_normal_form(A)
    assert matmul(matmul(U, A), V) == D
    r, c = len(A), len(A[0])
    assert all(D[i][j] == 0 for i in range(r) for j in range(c) if i != j)
    diag = [D[i][i] for i in range(min(r, c))]
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz) and diag[: len(nz)] == nz
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert abs(sympy.Matrix(U).det()) == 1 and abs(sympy.Matrix(V).det()) == 1
    if r == c and sympy.Matrix(A).det() != 0:
        assert abs(sympy.Matrix(A).det()) == math.prod(nz)


# -- properties against the brute-force oracle --------------------------------------


def test_ulm_kaplansky_formula_matches_definition():
    for p, bound in ((2, 64), (3, 81)):
        for C in p_groups(p, bound):
            for s in range(max(C.exponents) + 2):
                assert ulm_kaplansky(C, s) == ulm_kaplansky_by_definition(C, s), (C, s)


def order_lists(max_product=64):
    def build(xs):
        out, prod = [], 1
        for x in xs:
            if prod * x > max_product:
                break
            out.append(x)
            prod *= x
        return out

    return st.lists(st.integers(2, 32), max_size=6).map(build)


@given(order_lists(), order_lists())
@settings(max_examples=200, deadline=None)
def test_canonical_form_is_isomorphism_complete(a, b):
    same = from_cyclic_orders(0, a) == from_cyclic_orders(0, b)
    assert same == isomorphic(a, b)


def test_canonical_form_distinguishes_groups_of_each_order():
    for n in range(1, 65):
        groups = abelian_groups_of_order(n)
        assert len(set(groups)) == len(groups)
        for i, G in enumerate(groups):
            for H in groups[i + 1 :]:
                assert not isomorphic(G.invariant_factors, H.invariant_factors)


SMALL = [G for n in range(1, 33) for G in abelian_groups_of_order(n)]


@given(st.sampled_from(SMALL), st.sampled_from(SMALL))
@settings(max_examples=300, deadline=None)
def test_hom_group_size_matches_count(G, H):
    assert order(hom_group(G, H)) == count_homs(G.invariant_factors, H.invariant_factors)


@given(st.sampled_from(SMALL), st.sampled_from(SMALL))
@settings(max_examples=200, deadline=None)
def test_common_factor_symmetric_and_coprime(G, H):
    assert has_common_direct_factor(G, H) == has_common_direct_factor(H, G)
    if math.gcd(order(G), order(H)) == 1:
        assert not has_common_direct_factor(G, H)


# -- literal syntax -------------------------------------------------------------


def test_parse_and_format():
    assert parse_group("Z+Z/2+Z/12") == FgAbGroup(1, (2, 12))
    assert parse_group(" Z / 6 + Z / 4 ") == FgAbGroup(0, (2, 12))
    assert parse_group("0") == TRIVIAL
    assert format_group(TRIVIAL) == "0"
    assert format_group(FgAbGroup(2, (2, 4))) == "Z+Z+Z/2+Z/4"
    assert str(cyclic(6)) == "Z/6"


@pytest.mark.parametrize(
    "text, pos",
    [("Z/1", 2), ("Z+", 2), ("Q", 0), ("Z/2 Z", 4), ("", 0), ("0+Z", 0)],
)
def test_parse_errors_report_position(text, pos):
    with pytest.raises(GroupSyntaxError) as e:
        parse_group(text)
    assert e.value.position == pos


groups = st.builds(
    from_cyclic_orders, st.integers(0, 3), st.lists(st.integers(2, 60), max_size=4)
)


@given(groups)
def test_literal_round_trip(G):
    assert parse_group(format_group(G)) == G
