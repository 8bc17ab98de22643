import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudofree.abelian import FiniteAbelianGroup
from pseudofree.errors import InvalidParameters, OrderCapExceeded
from pseudofree.group.catalog import full_catalog, s5_subgroup_classes
from pseudofree.group.families import direct_product, named_group
from pseudofree.group.labels import find_isomorphism, is_isomorphic
from pseudofree.group.lattice import all_subgroups
from pseudofree.group.permgroup import group_from_generators
from pseudofree.group.permutation import Permutation
from pseudofree.group.structure import (
    ELEM_ABELIAN_RANK2,
    GENERALIZED_QUATERNION,
    INTERSECTING_PAIR,
    NONABELIAN_PQ,
    NORMAL_MAXIMAL,
    abelianization,
    dichotomy_counting_check,
    find_forbidden_subgroup,
    has_periodic_cohomology,
    maximal_dichotomy,
    metacyclic_shape,
    p_rank,
)

# subgroup counts and conjugacy class counts from the standard tables
LATTICE_SIZES = {
    "S(4)": (30, 11),
    "S(5)": (156, 19),
    "A(5)": (59, 9),
    "A(4)": (10, 5),
    "D(8)": (10, 8),
    "Q(8)": (6, 6),
    "Q(16)": (11, 9),
    "C(2) x C(2) x C(2)": (16, 16),
    "S(3)": (6, 4),
}


@pytest.mark.parametrize("spec, sizes", LATTICE_SIZES.items())
def test_lattice_sizes(group, spec, sizes):
    lat = all_subgroups(group(spec))
    assert (len(lat), len(lat.conjugacy_classes)) == sizes


def test_identity_first_and_tables(group):
    G = group("S(4)")
    assert G.order == 24
    assert G.elements[0].is_identity()
    mul = G.mul
    assert np.all(mul[0] == np.arange(24))
    assert np.all(mul[np.arange(24), G.inv] == 0)
    assert sorted(np.bincount(G.element_orders).nonzero()[0]) == [1, 2, 3, 4]


@pytest.mark.parametrize("spec, order", [("C(12)", 12), ("D(10)", 10), ("Q(16)", 16), ("Meta(7,3,2)", 21),
                                         ("ElemAb(3,2)", 9), ("A(5)", 60), ("S(5)", 120)])
def test_family_orders(group, spec, order):
    assert group(spec).order == order


def test_order_cap():
    with pytest.raises(OrderCapExceeded):
        named_group("S(5)", order_cap=100)


def test_maximal_subgroups_are_maximal(group):
    G = group("S(4)")
    lat = all_subgroups(G)
    for i in lat.maximal:
        over = [j for j in lat.overgroups_of(i) if j != i]
        assert over == [lat.top]


@pytest.mark.parametrize("spec, ab", [("S(4)", (2,)), ("A(4)", (3,)), ("Q(8)", (2, 2)), ("A(5)", ()),
                                      ("Meta(7,3,2)", (3,)), ("C(4) x C(6)", (2, 12))])
def test_abelianization(group, spec, ab):
    assert abelianization(group(spec)) == FiniteAbelianGroup(ab)


@pytest.mark.parametrize("spec, periodic", [("Q(8)", True), ("Q(16)", True), ("C(12)", True), ("S(3)", True),
                                            ("D(8)", False), ("A(4)", False), ("ElemAb(3,2)", False),
                                            ("Meta(7,3,2)", True), ("Q(12)", True)])
def test_periodicity(group, spec, periodic):
    G = group(spec)
    assert has_periodic_cohomology(G) is periodic
    # periodic iff every p-rank is at most one
    primes = {p for p in range(2, G.order + 1) if G.order % p == 0 and all(p % d for d in range(2, p))}
    assert periodic == all(p_rank(G, p) <= 1 for p in primes)


@pytest.mark.parametrize("spec, kind", [("S(3)", NONABELIAN_PQ), ("Q(8)", GENERALIZED_QUATERNION),
                                        ("A(4)", ELEM_ABELIAN_RANK2), ("D(8)", ELEM_ABELIAN_RANK2)])
def test_forbidden_subgroup(group, spec, kind):
    assert find_forbidden_subgroup(group(spec)).kind == kind


def test_cyclic_groups_have_no_forbidden_subgroup(group):
    for n in range(1, 25):
        assert find_forbidden_subgroup(group(f"C({n})")) is None


def test_dichotomy_examples(group):
    assert maximal_dichotomy(group("A(4)")).kind == NORMAL_MAXIMAL
    assert maximal_dichotomy(group("Q(8)")).kind == INTERSECTING_PAIR
    assert maximal_dichotomy(group("S(3)")).kind == NORMAL_MAXIMAL
    assert maximal_dichotomy(group("Q(8)"), prefer="normal").kind == NORMAL_MAXIMAL


def test_dichotomy_witness_is_valid(group):
    for spec in ["S(4)", "Meta(5,2,4)", "Q(16)", "A(5)", "D(12)"]:
        G = group(spec)
        lat = all_subgroups(G)
        res = maximal_dichotomy(G)
        assert all(i in lat.maximal for i in res.witness)
        if res.kind == NORMAL_MAXIMAL:
            assert lat.is_normal(res.witness[0])
        else:
            a, b = res.witness
            assert a != b and (lat.masks[a] & lat.masks[b]) >> 1  # shares a non-identity element


def test_counting_check_applies_nowhere(group):
    for spec in ["S(3)", "A(5)", "Q(8)"]:
        assert not dichotomy_counting_check(group(spec)).applicable


def test_metacyclic_shape(group):
    s = metacyclic_shape(group("Meta(7,3,2)"))
    assert (s.k, s.q, s.r) == (7, 3, 2)
    assert pow(s.r, s.q, s.k) == 1


def test_catalog_size():
    cat = full_catalog()
    assert len(cat) >= 100
    assert len({e.label for e in cat}) == len(cat)
    assert len(s5_subgroup_classes()) == 19


def test_labels_abelian_names(group):
    assert group("C(2) x C(6)").label == "C2xC6"
    assert group("C(6)").label == "C6"
    assert group("Q(8)").label.startswith("N8.")


def test_label_agrees_with_isomorphism(group):
    # D(6) and S(3) are the same group in two realizations; Q(8) and D(8) are not
    assert group("D(6)").label == group("S(3)").label
    assert is_isomorphic(group("D(6)"), group("S(3)"))
    assert group("Q(8)").label != group("D(8)").label
    assert not is_isomorphic(group("Q(8)"), group("D(8)"))
    assert group("C(2) x C(3)").label == group("C(6)").label


def _random_group(seed_perms):
    n = max(p.degree for p in seed_perms)
    gens = [p.extend(n) for p in seed_perms]
    return group_from_generators(gens, n, order_cap=64)


small_perm = st.permutations(range(5)).map(Permutation)


@settings(max_examples=40, deadline=None)
@given(st.lists(small_perm, min_size=1, max_size=2), st.permutations(range(5)))
def test_label_is_conjugation_invariant(gens, sigma):
    try:
        G = _random_group(gens)
    except OrderCapExceeded:
        return
    s = Permutation(sigma)
    H = group_from_generators([s * g * s.inverse() for g in gens], 5)
    assert G.label == H.label
    assert find_isomorphism(G, H) is not None


@settings(max_examples=30, deadline=None)
@given(st.lists(small_perm, min_size=1, max_size=2), st.lists(small_perm, min_size=1, max_size=2))
def test_same_label_iff_isomorphic(g1, g2):
    try:
        G, H = _random_group(g1), _random_group(g2)
    except OrderCapExceeded:
        return
    assert (G.label == H.label) == is_isomorphic(G, H)


def test_direct_product():
    G = direct_product(named_group("C(2)"), named_group("S(3)"))
    assert G.order == 12
    assert G.label == named_group("D(12)").label


def test_dichotomy_spec_examples(group):
    G = group("D(10)")
    res = maximal_dichotomy(G)
    lat = all_subgroups(G)
    assert res.kind == NORMAL_MAXIMAL and lat.label(res.witness[0]) == "C5"
    res = maximal_dichotomy(group("C(7)"))
    assert res.kind == NORMAL_MAXIMAL and all_subgroups(group("C(7)")).order(res.witness[0]) == 1
    res = maximal_dichotomy(group("Q(8)"))
    assert [all_subgroups(group("Q(8)")).label(i) for i in res.witness] == ["C4", "C4"]
    assert group("Q(8)").element_orders[res.element] == 2


def test_dichotomy_needs_nontrivial_group(group):
    with pytest.raises(InvalidParameters):
        maximal_dichotomy(group("C(1)"))
