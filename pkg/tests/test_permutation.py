import pytest
from hypothesis import given
from hypothesis import strategies as st

from pseudofree.errors import InvalidPermutation
from pseudofree.group.permutation import Permutation

perms = st.integers(1, 7).flatmap(lambda n: st.permutations(range(n))).map(Permutation)


def test_composition_is_functional():
    a = Permutation.from_cycles([(0, 1)], 3)
    b = Permutation.from_cycles([(1, 2)], 3)
    # (a*b)(x) = a(b(x))
    assert (a * b)(1) == a(b(1)) == 2
    assert (a * b).images == (1, 2, 0)


def test_cycle_string_is_one_based():
    assert Permutation.from_cycles([(0, 1, 2)]).cycle_string() == "(1 2 3)"
    assert Permutation.identity(3).cycle_string() == "()"


def test_degree_mismatch_rejected():
    with pytest.raises(InvalidPermutation):
        Permutation.from_cycles([(0, 1)]) * Permutation.from_cycles([(1, 2)])


def test_not_a_bijection():
    with pytest.raises(InvalidPermutation):
        Permutation([0, 0, 1])


@given(perms)
def test_inverse(p):
    e = Permutation.identity(p.degree)
    assert p * p.inverse() == e == p.inverse() * p


@given(perms)
def test_cycles_rebuild(p):
    assert Permutation.from_cycles(p.cycles(), p.degree) == p


@given(perms, st.integers(0, 4))
def test_extend_fixes_new_points(p, k):
    q = p.extend(p.degree + k)
    assert all(q(i) == p(i) for i in range(p.degree))
    assert all(q(i) == i for i in range(p.degree, p.degree + k))


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(*[st.permutations(range(n)).map(Permutation)] * 3)))
def test_associative(t):
    a, b, c = t
    assert (a * b) * c == a * (b * c)
