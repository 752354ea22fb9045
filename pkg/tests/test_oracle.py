import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfclose.abgroup import PrimaryComponent, parse_group
from selfclose.oracle import (
    BoundExceeded,
    RadicalOracle,
    abelian_groups_of_order,
    bijective_rows,
    check_bcm,
    check_lu,
    check_nj_equivalence,
    check_quasi_regular_and_nc,
    count_homs,
    enumerate_end,
    is_homomorphism_table,
    is_nilpotent_table,
    jacobson_radical,
    one_plus,
    one_plus_is_unit,
    unit_mask,
)


@pytest.mark.parametrize("orders, size", [((4,), 4), ((2, 2), 16), ((2, 4), 32), ((3, 9), 243), ((), 1)])
def test_end_sizes(orders, size):
    ring = enumerate_end(orders)
    assert ring.size == size == count_homs(orders, orders)


@pytest.mark.parametrize("orders", [(4,), (2, 2), (2, 4), (6,), (2, 2, 2)])
def test_end_tables_are_distinct_homomorphisms(orders):
    ring = enumerate_end(orders)
    tabs = ring.all_tables()
    assert len(np.unique(tabs, axis=0)) == ring.size
    assert all(is_homomorphism_table(ring.G, t) for t in tabs)
    assert np.array_equal(ring.tables([0])[0], ring.zero)
    for i in (0, ring.size // 2, ring.size - 1):
        assert np.array_equal(ring.table_of(ring.matrix(i)), tabs[i])


def test_bounds():
    with pytest.raises(BoundExceeded):
        enumerate_end((2, 4, 8, 8))
    with pytest.raises(BoundExceeded):
        enumerate_end((0, 2))
    assert enumerate_end((2, 4, 8, 8), max_order=512, max_end=16).size == 2**4 * (2 * 4**3) * (2 * 4 * 8 * 8) ** 2


# |J| = |R| / |R/J|; R/J is a product of matrix rings M_{u_s}(F_p) over the
# nonzero Ulm-Kaplansky invariants u_s
@pytest.mark.parametrize(
    "orders, radical",
    [((4,), 2), ((2, 2), 1), ((5,), 1), ((2, 4), 8), ((3, 9), 27), ((8,), 4), ((2, 2, 4), 1024 // 32)],
)
def test_radical_sizes(orders, radical):
    assert len(jacobson_radical(enumerate_end(orders))) == radical


def nil_left_ideal_members(ring):
    # in a finite ring J is the largest nil left ideal: x in J iff every r x is nilpotent
    tabs = ring.all_tables()
    return [i for i in range(ring.size) if all(is_nilpotent_table(t) for t in np.unique(tabs[:, tabs[i]], axis=0))]


SMALL = [G for n in range(1, 17) for G in abelian_groups_of_order(n) if count_homs(G.invariant_factors, G.invariant_factors) <= 256]


@pytest.mark.parametrize("G", SMALL, ids=str)
def test_radical_matches_nil_ideal_route(G):
    ring = enumerate_end(G)
    J = jacobson_radical(ring)
    assert J == nil_left_ideal_members(ring)
    rad = RadicalOracle(ring)
    tabs = ring.all_tables()
    for i in range(ring.size):
        assert rad.member(tabs[i])[0] == (i in J)


@pytest.mark.parametrize("G", SMALL, ids=str)
def test_radical_is_two_sided_ideal(G):
    ring = enumerate_end(G)
    tabs = ring.all_tables()
    keys = {tabs[i].tobytes() for i in jacobson_radical(ring)}
    members = [np.frombuffer(k, dtype=tabs.dtype) for k in keys]
    for x, y in itertools.product(members, repeat=2):
        assert ring.G.add_table[x, y].tobytes() in keys
    for x in members:
        for r in tabs:
            assert r[x].tobytes() in keys and x[r].tobytes() in keys


def test_non_member_witness():
    ring = enumerate_end((2, 2))
    rad = RadicalOracle(ring)
    x = ring.identity
    ok, (r, s) = rad.member(x)
    assert not ok
    y = ring.tables([r])[0][x if s is None else x[ring.tables([s])[0]]]
    assert not bijective_rows(one_plus(ring.G, y[None]))[0]


@given(st.sampled_from([(4,), (2, 2), (2, 4), (3, 3), (8,), (2, 2, 2), (9, 3)]), st.integers(0, 10**6))
@settings(max_examples=80, deadline=None)
def test_kernel_unit_test_matches_bijectivity(orders, seed):
    ring = enumerate_end(orders)
    idx = np.random.default_rng(seed).integers(0, ring.size, 64)
    tabs = ring.tables(idx)
    assert np.array_equal(one_plus_is_unit(ring.G, tabs), bijective_rows(one_plus(ring.G, tabs)))


def test_unit_counts():
    # |GL_2(F_2)| = 6 and |Aut(Z/2+Z/4)| = 8
    assert unit_mask(enumerate_end((2, 2))).sum() == 6
    assert unit_mask(enumerate_end((2, 4))).sum() == 8
    assert unit_mask(enumerate_end((9,))).sum() == 6


# -- labs ---------------------------------------------------------------------


@pytest.mark.parametrize("lit", ["Z/4", "Z/2+Z/2", "Z/2+Z/4", "Z/9+Z/3"])
def test_quasi_regularity_lab(lit):
    rep = check_quasi_regular_and_nc(parse_group(lit))
    assert rep.passed and not rep.counterexamples
    assert rep.counts["commuting_pairs"] > 0


@pytest.mark.parametrize(
    "p, exps", [(2, (1,)), (2, (2,)), (2, (1, 1)), (2, (1, 2)), (2, (2, 2)), (2, (1, 3)), (3, (1,)), (3, (1, 2))]
)
def test_nj_lab(p, exps):
    rep = check_nj_equivalence(PrimaryComponent(p, exps))
    assert rep.passed
    distinct = len(set(exps)) == len(exps)
    assert rep.counts["criterion"] == distinct == rep.counts["quotient_reduced"]
    assert rep.counts["nilpotents_in_radical"] == distinct


def test_nj_lab_example():
    rep = check_nj_equivalence(PrimaryComponent(2, (1, 2)))
    assert rep.counts["criterion"] and rep.counts["quotient_reduced"] and rep.counts["nilpotents_in_radical"]
    assert rep.counts["radical"] == 8


def test_bcm_examples():
    rep = check_bcm(parse_group("Z/2"), parse_group("Z/3"))
    assert rep.passed and rep.counts["automorphisms"] == 2 and rep.counts["irreducible"] == 0
    rep = check_bcm(parse_group("Z/2"), parse_group("Z/4"))
    assert rep.passed and rep.counts["automorphisms"] == 8 and rep.counts["irreducible"] == 0
    rep = check_bcm(parse_group("Z/2"), parse_group("Z/2"))
    # GL_2(F_2) has 6 elements, 3 of which have a zero on the diagonal
    assert rep.passed and rep.counts["common_factor"] and rep.counts["irreducible"] == 3
    assert [[0, 1], [1, 0]] in rep.counterexamples


def test_lu_examples():
    rep = check_lu([parse_group("Z/2"), parse_group("Z/4")])
    assert rep.passed and rep.counts["factored"] == rep.counts["reducible"] == 8
    rep = check_lu([parse_group("Z/2"), parse_group("Z/3"), parse_group("Z/5")])
    assert rep.passed and rep.counts["factored"] == rep.counts["reducible"] == 8


def test_report_json():
    d = check_bcm((2,), (3,)).to_dict()
    assert d["lab"] == "bcm" and d["passed"] is True and d["subject"] == "(Z/2, Z/3)"
