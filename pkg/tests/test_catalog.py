import copy

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfclose.abgroup import TRIVIAL, Z, cyclic, hom_group, parse_group
from selfclose.catalog import (
    EM,
    TABLE_ENV,
    Atomic,
    CplxProj,
    DomainError,
    Field,
    Lens,
    Moore,
    Projective,
    QuatProj,
    RealProj,
    Sphere,
    Status,
    TableError,
    all_maps_trivial_on_pik,
    are_n_distant,
    bundled_table,
    check_distance,
    check_triviality,
    get_table,
    homology_group,
    homotopy_group,
    known_finite,
    parse_table,
    self_closeness,
    set_table,
    space_from_dict,
    space_to_dict,
)


@pytest.fixture(autouse=True)
def _default_table():
    set_table(None)
    yield
    set_table(None)


# -- descriptors ------------------------------------------------------------------


@pytest.mark.parametrize(
    "build",
    [
        lambda: Sphere(0),
        lambda: Moore(cyclic(2), 1),
        lambda: Moore(TRIVIAL, 3),
        lambda: EM(cyclic(2), 0),
        lambda: RealProj(1),
        lambda: CplxProj(1),
        lambda: Lens(0, 3),
        lambda: Lens(2, 4),
        lambda: Atomic("A", 3, 6, 1),
        lambda: Atomic("A", 0, 2, 1),
    ],
)
def test_domain_errors(build):
    with pytest.raises(DomainError):
        build()


SPACES = [
    Sphere(3),
    Moore(parse_group("Z/2+Z"), 4),
    EM(parse_group("Z/6"), 2),
    RealProj(4),
    CplxProj(3),
    QuatProj(2),
    Lens(2, 5),
    Atomic("A", 5, 3, None, frozenset({"B"})),
]


@pytest.mark.parametrize("X", SPACES, ids=lambda X: X.label)
def test_descriptor_round_trip(X):
    assert space_from_dict(space_to_dict(X)) == X


def test_labels():
    assert [X.label for X in SPACES[:7]] == ["S^3", "M(Z+Z/2,4)", "K(Z/6,2)", "RP^4", "CP^3", "HP^2", "L(5,5)"]


# -- homotopy groups ---------------------------------------------------------------


def test_projective_examples():
    assert homotopy_group(CplxProj(3), 2) == Z
    assert homotopy_group(CplxProj(3), 5) == TRIVIAL
    assert homotopy_group(CplxProj(3), 7) == Z


def test_sphere_and_lens_examples():
    assert homotopy_group(Sphere(4), 4) == Z
    assert homotopy_group(Sphere(4), 3) == TRIVIAL
    assert homotopy_group(Sphere(2), 3) == Z
    assert homotopy_group(Sphere(3), 4) == cyclic(2)
    assert homotopy_group(Sphere(4), 7) == parse_group("Z+Z/12")
    assert homotopy_group(Lens(2, 3), 1) == cyclic(3)
    assert homotopy_group(Sphere(2), 40) is None
    with pytest.raises(ValueError):
        homotopy_group(Sphere(2), 0)


def test_moore_and_em():
    M = Moore(cyclic(6), 3)
    assert homotopy_group(M, 2) == TRIVIAL
    assert homotopy_group(M, 3) == cyclic(6)
    assert homotopy_group(M, 4) is None
    assert homotopy_group(Moore(Z, 3), 4) == homotopy_group(Sphere(3), 4)
    K = EM(parse_group("Z+Z/6"), 4)
    assert [homotopy_group(K, k) for k in (3, 4, 5)] == [TRIVIAL, parse_group("Z+Z/6"), TRIVIAL]


def test_atomic_groups():
    A = Atomic("A", 3, 2, 2)
    assert homotopy_group(A, 2) == TRIVIAL
    assert homotopy_group(A, 3) == cyclic(4)
    assert homotopy_group(A, 4) is None
    assert homotopy_group(Atomic("B", 3, 2, None), 3) is None


def z_f(field):
    return cyclic(2) if field is Field.R else Z


@pytest.mark.parametrize("field", [Field.R, Field.C])
@pytest.mark.parametrize("n", range(2, 8))
def test_projective_partial_homotopy_clauses(field, n):
    X = Projective(field, n)
    d = field.value
    top = d * (n + 1) - 1
    for k in range(1, top + 1):
        G = homotopy_group(X, k)
        if k == d:
            assert G == z_f(field)
        elif k == top:
            assert G == Z
        else:
            assert G == TRIVIAL


@pytest.mark.parametrize("n", range(2, 5))
def test_quaternionic_bottom(n):
    X = QuatProj(n)
    assert [homotopy_group(X, k) for k in (1, 2, 3, 4)] == [TRIVIAL, TRIVIAL, TRIVIAL, Z]
    assert homotopy_group(X, 5) == cyclic(2)  # from π_4(S^3) via the fibration


def test_homology():
    assert homology_group(RealProj(5), 3) == cyclic(2)
    assert homology_group(RealProj(5), 5) == Z
    assert homology_group(RealProj(4), 4) == TRIVIAL
    assert homology_group(CplxProj(3), 4) == Z
    assert homology_group(Lens(2, 3), 3) == cyclic(3)
    assert homology_group(EM(Z, 2), 3) is None


def test_self_closeness_values():
    assert self_closeness(CplxProj(5)) == 2
    assert self_closeness(QuatProj(3)) == 4
    assert self_closeness(RealProj(6)) == 6
    assert self_closeness(Moore(cyclic(6), 3)) == 3
    assert self_closeness(Lens(3, 5)) == 7
    assert self_closeness(Atomic("A", 9, 3, 1)) == 9


def test_serre_finiteness():
    assert known_finite(Sphere(4), 6)
    assert not known_finite(Sphere(4), 7)
    assert known_finite(Sphere(3), 30)
    assert not known_finite(Sphere(3), 3)


# -- triviality facts ---------------------------------------------------------------


def test_triviality_examples():
    f = all_maps_trivial_on_pik(Sphere(2), Sphere(5), 5)
    assert f.status is Status.TRIVIAL_FACT and f.reason == "hom-vanishes"
    f = all_maps_trivial_on_pik(Sphere(3), EM(cyclic(3), 4), 4)
    assert f.status is Status.TRIVIAL_FACT
    assert hom_group(cyclic(2), cyclic(3)) == TRIVIAL
    assert all_maps_trivial_on_pik(Sphere(2), Sphere(2), 2).status is Status.UNKNOWN


def test_cited_rules():
    f = all_maps_trivial_on_pik(CplxProj(3), CplxProj(2), 2)
    assert f.reason == "proj-cohomology"
    f = all_maps_trivial_on_pik(Lens(3, 5), Lens(2, 5), 1)
    assert f.reason == "lens-cohomology"
    assert all_maps_trivial_on_pik(Lens(3, 5), Lens(1, 5), 1).status is Status.UNKNOWN
    f = all_maps_trivial_on_pik(RealProj(2), RealProj(5), 5)
    assert f.holds


def test_products_are_pairwise():
    f = all_maps_trivial_on_pik([Sphere(2), Sphere(3)], [EM(cyclic(5), 4)], 4)
    assert f.reason == "pairwise" and len(f.detail["pairs"]) == 2
    assert check_triviality([Sphere(2), Sphere(3)], [EM(cyclic(5), 4)], 4, f.to_dict())


def test_replay_rejects_forgery():
    f = all_maps_trivial_on_pik(Sphere(3), Sphere(5), 3).to_dict()
    assert check_triviality(Sphere(3), Sphere(5), 3, f)
    forged = copy.deepcopy(f)
    forged["detail"]["target_group"] = "Z"
    assert not check_triviality(Sphere(3), Sphere(5), 3, forged)
    assert not check_triviality(Sphere(3), Sphere(3), 3, f)
    assert not check_triviality(Sphere(3), Sphere(5), 3, {"reason": "wishful"})


CATALOG = [
    Sphere(1), Sphere(2), Sphere(3), Sphere(4), Sphere(6),
    Moore(cyclic(2), 2), Moore(Z, 4), Moore(cyclic(12), 5), Moore(cyclic(3), 3),
    EM(Z, 3), EM(cyclic(2), 2), EM(cyclic(3), 4), EM(parse_group("Z+Z/2"), 1),
    RealProj(2), RealProj(3), RealProj(5), CplxProj(2), CplxProj(3), QuatProj(2),
    Lens(1, 3), Lens(2, 3), Lens(2, 5),
]  # fmt: skip

spaces = st.sampled_from(CATALOG)


@given(spaces, spaces, st.integers(1, 8))
@settings(max_examples=300, deadline=None)
def test_trivial_facts_replay(X, Y, k):
    f = all_maps_trivial_on_pik(X, Y, k)
    if f.holds:
        assert f.reason in ("hom-vanishes", "finite-to-free", "sphere-null", "hurewicz-null", "proj-cohomology", "lens-cohomology")
        assert check_triviality(X, Y, k, f.to_dict())
        if f.reason == "hom-vanishes":
            a, b = homotopy_group(X, k), homotopy_group(Y, k)
            # one trivial side settles it even when the other is not catalogued
            if any(G is not None and G.is_trivial for G in (a, b)):
                return
            assert a is not None and b is not None
            assert hom_group(a, b).is_trivial


# -- distance ---------------------------------------------------------------------


def test_distance_examples():
    r = are_n_distant(Moore(cyclic(2), 2), Moore(Z, 4), 4)
    assert r.status is Status.DISTANT
    assert check_distance(Moore(cyclic(2), 2), Moore(Z, 4), 4, r.degrees)
    assert are_n_distant(RealProj(2), RealProj(5), 5).status is Status.DISTANT
    r = are_n_distant(Sphere(3), EM(Z, 3), 3)
    assert r.status is Status.UNKNOWN and r.failed_at == 3


def test_distance_replay_rejects_truncation():
    r = are_n_distant(Sphere(2), Sphere(5), 5)
    assert r.holds
    assert not check_distance(Sphere(2), Sphere(5), 5, r.degrees[:-1])
    assert not check_distance(Sphere(2), Sphere(5), 6, r.degrees)


@given(spaces, spaces, st.integers(1, 7))
@settings(max_examples=200, deadline=None)
def test_distance_symmetric_and_downward_closed(X, Y, n):
    r = are_n_distant(X, Y, n)
    assert r.status is are_n_distant(Y, X, n).status
    if r.holds:
        assert check_distance(X, Y, n, r.degrees)
        for m in range(1, n):
            assert are_n_distant(X, Y, m).holds


# -- sphere table -----------------------------------------------------------------


def test_bundled_table_shape():
    t = bundled_table()
    assert t.version
    for n in range(1, 9):
        for k in range(n + 1, n + 9):
            assert t.lookup(n, k) is not None, (n, k)
    assert t.lookup(3, 40) is None


def test_table_errors_have_positions():
    with pytest.raises(TableError) as e:
        parse_table("2 3 Z\n3 x Z\n")
    assert e.value.line == 2 and e.value.column == 1
    with pytest.raises(TableError) as e:
        parse_table("3 4 Z/2+Q\n")
    assert e.value.line == 1 and e.value.column == 9
    with pytest.raises(TableError):
        parse_table("4 4 Z/2\n")
    with pytest.raises(TableError):
        parse_table("4 2 Z\n")
    with pytest.raises(TableError):
        parse_table("4 6 Z/2\n4 6 Z/2\n")


def test_table_override(tmp_path, monkeypatch):
    path = tmp_path / "t.txt"
    path.write_text("# version test\n3 4 Z/2\n")
    monkeypatch.setenv(TABLE_ENV, str(path))
    set_table(None)
    assert get_table().version == "test"
    assert homotopy_group(Sphere(3), 4) == cyclic(2)
    assert homotopy_group(Sphere(3), 5) is None
    monkeypatch.delenv(TABLE_ENV)
    set_table(None)
    assert homotopy_group(Sphere(3), 5) == cyclic(2)
