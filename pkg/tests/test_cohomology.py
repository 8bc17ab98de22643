import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudofree.abelian import FiniteAbelianGroup as A
from pseudofree.cohomology.modules import CoefficientModule
from pseudofree.cohomology.oracle import oracle_cohomology
from pseudofree.cohomology.tables import (
    CohomologyTable,
    cohomological_period,
    cyclic_table,
    formula_table,
    metacyclic_table,
    periodic_table,
    table_order_at,
)
from pseudofree.errors import InvalidCoefficients, NotPeriodic
from pseudofree.group.lattice import all_subgroups

Z, O = A.free(1), A.trivial()
TRIVIAL = CoefficientModule.trivial()


def cyc(n):
    return A.cyclic(n)


def test_cyclic_table():
    t = cyclic_table(5, 6)
    assert t.entries == (Z, O, cyc(5), O, cyc(5), O, cyc(5))
    assert t.period == 2


@pytest.mark.parametrize("p, q, r", [(3, 2, 2), (5, 2, 4), (7, 3, 2)])
def test_metacyclic_lemma(p, q, r):
    # H^0 = Z; H^{2k} = Z_pq when q | k, Z_q otherwise; odd degrees vanish
    t = metacyclic_table(p, q, r, TRIVIAL, 4 * q + 2)
    for i, g in enumerate(t.entries):
        if i == 0:
            assert g == Z
        elif i % 2:
            assert g == O
        else:
            assert g == cyc(p * q if (i // 2) % q == 0 else q)
    assert t.period == 2 * q


@pytest.mark.parametrize("p, q, r", [(3, 2, 2), (7, 3, 2)])
def test_metacyclic_permutation_modules(group, p, q, r):
    G = group(f"Meta({p},{q},{r})")
    lat = all_subgroups(G)
    for i in lat:
        if lat.order(i) in (p, q):
            t = formula_table(G, CoefficientModule.permutation(G, lat.masks[i]), 6)
            # Shapiro: cohomology of the subgroup
            assert t.entries == (Z,) + (O, cyc(lat.order(i))) * 3
    assert formula_table(G, CoefficientModule.group_ring(), 4).entries == (Z, O, O, O, O)


def test_q8_and_period(group):
    G = group("Q(8)")
    t = formula_table(G, TRIVIAL, 8)
    assert t.entries[:5] == (Z, O, A((2, 2)), O, cyc(8))
    assert cohomological_period(G) == 4
    assert cohomological_period(group("Meta(7,3,2)")) == 6
    assert cohomological_period(group("A(4)")) is None


def test_not_periodic(group):
    with pytest.raises(NotPeriodic):
        formula_table(group("A(4)"), TRIVIAL, 4)


def test_periodic_table_order():
    t = periodic_table(8, A((2, 2)), 10)
    assert table_order_at(t, 8).to_int() == 8
    assert table_order_at(t, 6).to_int() == 4


@pytest.mark.parametrize("spec, depth", [("Q(8)", 5), ("S(3)", 5), ("C(6)", 5), ("Meta(5,2,4)", 4),
                                         ("Meta(7,3,2)", 4), ("Q(12)", 4)])
def test_formula_matches_oracle(group, spec, depth):
    G = group(spec)
    assert formula_table(G, TRIVIAL, depth).same_entries(oracle_cohomology(G, TRIVIAL, depth))


def test_oracle_on_non_periodic(group):
    # H^*(C2 x C2) = Z, 0, Z2^2, Z2, Z2^3
    t = oracle_cohomology(group("ElemAb(2,2)"), TRIVIAL, 4)
    assert t.entries == (Z, O, A((2, 2)), cyc(2), A((2, 2, 2)))


def test_bar_and_resolution_agree(group):
    G = group("S(3)")
    assert oracle_cohomology(G, TRIVIAL, 3, method="bar").same_entries(oracle_cohomology(G, TRIVIAL, 3))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.data())
def test_shapiro_on_cyclic_groups(group, n, data):
    G = group(f"C({n})")
    lat = all_subgroups(G)
    i = data.draw(st.sampled_from(list(lat)))
    coeff = CoefficientModule.permutation(G, lat.masks[i])
    expect = cyclic_table(lat.order(i), 4).entries
    assert oracle_cohomology(G, coeff, 4).entries == expect
    assert formula_table(G, coeff, 4).entries == expect


def test_table_json_round_trip(group):
    t = formula_table(group("Meta(7,3,2)"), TRIVIAL, 12)
    assert CohomologyTable.from_json(t.to_json()) == t
    assert t.first_difference(t) is None


def test_first_difference():
    a, b = cyclic_table(4, 4), cyclic_table(2, 4)
    assert a.first_difference(b) == 2


def test_module_round_trip(group):
    G = group("S(3)")
    lat = all_subgroups(G)
    m = CoefficientModule.permutation(G, lat.masks[lat.maximal[0]])
    assert CoefficientModule.from_dict(m.to_dict()) == m


def test_module_from_foreign_mask(group):
    with pytest.raises(InvalidCoefficients):
        CoefficientModule.permutation(group("S(3)"), 0b10)  # not a subgroup


@pytest.mark.parametrize("spec, k", [("Meta(7,3,2)", 3), ("Meta(5,2,4)", 2), ("S(3)", 2)])
def test_permutation_module_independent_of_conjugate(group, spec, k):
    G = group(spec)
    lat = all_subgroups(G)
    conj = [i for i in lat if lat.order(i) == k]
    assert len(conj) > 1
    tables = {oracle_cohomology(G, CoefficientModule.permutation(G, lat.masks[i]), 5).entries for i in conj}
    assert len(tables) == 1
