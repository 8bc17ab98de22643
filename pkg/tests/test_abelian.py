from math import prod

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import factorint

from pseudofree.abelian import FactoredOrder, FiniteAbelianGroup

small = st.integers(min_value=1, max_value=10**6)


@given(small, small)
def test_factored_product_matches_integers(a, b):
    fa, fb = FactoredOrder.from_int(a), FactoredOrder.from_int(b)
    assert (fa * fb).to_int() == a * b
    assert dict(fa) == {p: e for p, e in factorint(a).items()}


@given(small, st.integers(min_value=0, max_value=5))
def test_factored_power(a, k):
    assert (FactoredOrder.from_int(a) ** k).to_int() == a**k


@given(small)
def test_factored_dict_round_trip(a):
    f = FactoredOrder.from_int(a)
    assert FactoredOrder.from_dict(f.to_dict()) == f
    assert hash(FactoredOrder.from_dict(f.to_dict())) == hash(f)


def test_factored_equality_ignores_zero_exponents():
    assert FactoredOrder({2: 3, 5: 0}) == FactoredOrder({2: 3})
    assert FactoredOrder() == FactoredOrder.from_int(1)
    assert str(FactoredOrder({2: 13})) == "2^13"


@given(st.lists(st.integers(min_value=1, max_value=60), max_size=6), st.integers(0, 3))
def test_normalisation_preserves_order(orders, free):
    A = FiniteAbelianGroup.from_cyclic_orders(orders, free)
    inv = A.invariant_factors
    assert all(b % a == 0 for a, b in zip(inv, inv[1:]))
    assert A.free_rank == free
    if free == 0:
        assert A.order == prod(orders)


@given(st.lists(st.integers(2, 40), max_size=4), st.lists(st.integers(2, 40), max_size=4))
def test_direct_sum(xs, ys):
    a = FiniteAbelianGroup.from_cyclic_orders(xs)
    b = FiniteAbelianGroup.from_cyclic_orders(ys)
    assert a + b == FiniteAbelianGroup.from_cyclic_orders(xs + ys)
    assert FiniteAbelianGroup.from_list((a + b).to_list()) == a + b


def test_invariant_factor_examples():
    assert FiniteAbelianGroup.from_cyclic_orders([2, 3]).invariant_factors == (6,)
    assert FiniteAbelianGroup.from_cyclic_orders([2, 4, 2]).invariant_factors == (2, 2, 4)
    assert FiniteAbelianGroup.cyclic(1).is_trivial
    assert str(FiniteAbelianGroup.free(1)) == "Z"


def test_invalid_chain_rejected():
    with pytest.raises(ValueError):
        FiniteAbelianGroup((2, 3))
    with pytest.raises(ValueError):
        FiniteAbelianGroup((1,))
