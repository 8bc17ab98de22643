import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pseudofree.errors import InvalidParameters, NotUnimodular, SearchBound
from pseudofree.forms import (
    GUARANTEED,
    NOT_GUARANTEED,
    TAG_LARGE_PRIME,
    CollapseVerdict,
    IntersectionForm,
    collapse_guaranteed,
    diagonal,
    e8,
    elemabel_fixed_points,
    form_catalog,
    hyperbolic,
    parse_form,
    reduce_mod_p,
    verify_witness,
)


def brute_not_guaranteed(form, p):
    """Independent oracle: look for a bad class u by enumerating F_p^n."""
    n = form.rank
    if n == 0:
        return p == 2
    V = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64)
    D = (V @ np.array(form.matrix, dtype=np.int64) @ V.T) % p
    index = {tuple(v): k for k, v in enumerate(V.tolist())}
    for k in range(1, len(V)):
        zeros = np.flatnonzero(D[k] == 0)
        if len(zeros) > p:  # u^perp is bigger than the line through u
            continue
        span = {index[tuple(c * x % p for x in V[k].tolist())] for c in range(p)}
        if set(zeros.tolist()) <= span:
            if (p == 3 and D[k, k] != 0) or (p == 2 and D[k, k] == 0):
                return True
    return False


def test_constructors():
    assert e8().rank == 8 and e8().is_even and e8().signature == 8
    assert hyperbolic(2).rank == 4 and hyperbolic(2).signature == 0
    assert diagonal([1, -1]).name == "diag:+1,-1"
    assert (e8() + hyperbolic()).name == "E8+H"


def test_not_unimodular():
    with pytest.raises(NotUnimodular):
        IntersectionForm(((2,),))
    with pytest.raises(InvalidParameters):
        IntersectionForm(((0, 1), (2, 0)))
    with pytest.raises(InvalidParameters):
        diagonal([2])


@pytest.mark.parametrize("text, rank, sig", [("0", 0, 0), ("diag:", 0, 0), ("diag:+1,-1", 2, 0), ("H*3", 6, 0),
                                             ("E8", 8, 8), ("E8+H", 10, 8), ("diag:+1 + H", 3, 1),
                                             ("[[0,1],[1,0]]", 2, 0)])
def test_parse_form(text, rank, sig):
    f = parse_form(text)
    assert (f.rank, f.signature) == (rank, sig)


@pytest.mark.parametrize("text", ["F4", "H*0", "diag:+2", "[[1,2]]", "[[2]]"])
def test_parse_form_rejects(text):
    with pytest.raises((InvalidParameters, NotUnimodular)):
        parse_form(text)


def test_form_dict_round_trip():
    for f in form_catalog():
        assert IntersectionForm.from_dict(json.loads(json.dumps(f.to_dict()))) == f


def test_reduce_mod_p_checks_prime():
    with pytest.raises(InvalidParameters):
        reduce_mod_p(hyperbolic(), 4)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_collapse_matches_brute_force(p):
    for f in form_catalog():
        if p**f.rank > 2500:
            continue
        v = collapse_guaranteed(reduce_mod_p(f, p))
        assert (v.outcome == NOT_GUARANTEED) == brute_not_guaranteed(f, p), f.name


@given(st.integers(0, 4), st.integers(0, 4), st.sampled_from([5, 7, 11, 13]))
def test_large_primes_always_guaranteed(a, b, p):
    v = collapse_guaranteed(reduce_mod_p(diagonal([1] * a + [-1] * b), p))
    assert v.outcome == GUARANTEED and v.tag == TAG_LARGE_PRIME


def test_hyperbolic_witness_is_e1():
    v = collapse_guaranteed(reduce_mod_p(hyperbolic(), 2))
    assert v.outcome == NOT_GUARANTEED and v.witness == (1, 0)
    assert verify_witness(reduce_mod_p(hyperbolic(), 2), v)


def test_rank_zero():
    zero = diagonal([])
    assert collapse_guaranteed(reduce_mod_p(zero, 2)).outcome == NOT_GUARANTEED
    assert collapse_guaranteed(reduce_mod_p(zero, 3)).outcome == GUARANTEED


def test_search_bound():
    with pytest.raises(SearchBound):
        collapse_guaranteed(reduce_mod_p(e8() + hyperbolic(), 3), search_cap=1000)


def test_verdict_round_trip():
    v = collapse_guaranteed(reduce_mod_p(diagonal([1]), 3))
    assert CollapseVerdict.from_dict(json.loads(json.dumps(v.to_dict()))) == v


def test_elemabel_fixed_points():
    assert elemabel_fixed_points(3, hyperbolic(2), 4) == 6
    assert elemabel_fixed_points(2, hyperbolic(), 2) is None
    with pytest.raises(InvalidParameters):
        elemabel_fixed_points(3, hyperbolic(), 3)
