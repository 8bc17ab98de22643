from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from pseudofree import smith
from pseudofree.abelian import FiniteAbelianGroup


def reference(rows, ncols):
    m = Matrix(rows) if rows else Matrix.zeros(0, ncols)
    snf = smith_normal_form(m, domain=ZZ)
    diag = [abs(snf[i, i]) for i in range(min(snf.shape))]
    return sum(1 for d in diag if d), sorted(int(d) for d in diag if d > 1)


matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=1, max_size=6)
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_smith_matches_sympy(rows):
    res = smith.smith_invariants(rows)
    r, tors = reference(rows, len(rows[0]))
    assert res.rank == r
    # diagonal entries, so compare up to isomorphism
    assert FiniteAbelianGroup.from_cyclic_orders(res.torsion) == FiniteAbelianGroup.from_cyclic_orders(tors)


def test_sparse_and_dense_inputs_agree():
    dense = [[2, 0, 0], [0, 4, 0], [0, 0, 6]]
    sparse = [{0: 2}, {1: 4}, {2: 6}]
    a = FiniteAbelianGroup.from_cyclic_orders(smith.smith_invariants(dense).torsion)
    assert a == FiniteAbelianGroup.from_cyclic_orders(smith.smith_invariants(sparse).torsion)
    assert a.invariant_factors == (2, 2, 12)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_kernel_basis_is_kernel(rows):
    n = len(rows[0])
    for v in smith.kernel_basis(rows, n):
        assert all(sum(r[c] * x for c, x in v.items()) == 0 for r in rows)
    assert len(smith.kernel_basis(rows, n)) == n - smith.rank(rows)
