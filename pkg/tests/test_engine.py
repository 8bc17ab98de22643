import dataclasses
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudofree.engine import (
    CASE1_MERGE,
    CYCLIC_SEMIFREE,
    CYCLICITY_FAIL,
    ELEMAB_CONTRADICTION,
    EXCLUDED,
    LEFSCHETZ,
    METACYCLIC_INFEASIBLE,
    NORMAL_EXTENSION,
    OUT_OF_SCOPE,
    QUATERNION_CENTER,
    SUBGROUP_EXCLUDED,
    ObstructionStep,
    SurveyReport,
    Verdict,
    VerdictMemo,
    decide_pseudofree,
    explain,
    replay,
    survey,
)
from pseudofree.errors import InvalidParameters
from pseudofree.group.catalog import full_catalog
from pseudofree.group.structure import is_cyclic

CATALOG = full_catalog(24)


def test_cyclic(group):
    v = decide_pseudofree(group("C(6)"), 3)
    assert v.kind == CYCLIC_SEMIFREE and v.fixed_points == 5
    assert v.rules() == [LEFSCHETZ]
    assert v.describe() == "CyclicSemifree(5)"


def test_metacyclic(group):
    v = decide_pseudofree(group("Meta(3,2,2)"), 3)
    assert v.kind == EXCLUDED
    assert v.rules() == [NORMAL_EXTENSION, METACYCLIC_INFEASIBLE]
    assert v.describe() == "Excluded via MetacyclicOrbitInfeasible(3,2,3)"


def test_quaternion(group):
    v = decide_pseudofree(group("Q(8)"), 3)
    assert v.rules() == [QUATERNION_CENTER, CASE1_MERGE, CYCLICITY_FAIL]
    assert v.trace[-1].params["collapsed_int"] == 2**13
    assert v.trace[-1].params["fixed_set_int"] == 2**10


def test_elementary_abelian(group):
    v = decide_pseudofree(group("ElemAb(2,2)"), 4)
    assert v.leaf().rule == ELEMAB_CONTRADICTION and v.leaf().params["p"] == 2


def test_induction_through_subgroup(group):
    v = decide_pseudofree(group("A(4)"), 3)
    assert v.rules()[0] == SUBGROUP_EXCLUDED
    assert v.trace[0].params["subgroup"] == "C2xC2"
    assert v.trace[0].child.kind == EXCLUDED


def test_large_metacyclic(group):
    assert decide_pseudofree(group("Meta(7,3,2)"), 5).kind == EXCLUDED


@pytest.mark.parametrize("b2", [0, 1, 2])
def test_small_b2_out_of_scope(group, b2):
    v = decide_pseudofree(group("S(3)"), b2)
    assert v.kind == OUT_OF_SCOPE and len(v.exceptions) == 3
    assert any("C3xC3" in e for e in v.exceptions)


def test_negative_b2(group):
    with pytest.raises(InvalidParameters):
        decide_pseudofree(group("C(2)"), -1)


def test_memo_is_keyed_by_label(group):
    memo = VerdictMemo()
    a = decide_pseudofree(group("D(6)"), 3, memo)
    b = decide_pseudofree(group("S(3)"), 3, memo)
    assert a is b
    assert len(memo) >= 2  # the group and its maximal subgroups


def test_verdict_validation():
    with pytest.raises(InvalidParameters):
        Verdict(EXCLUDED, "C2", 2, 3)
    with pytest.raises(InvalidParameters):
        Verdict(CYCLIC_SEMIFREE, "C2", 2, 3, fixed_points=4)
    with pytest.raises(InvalidParameters):
        ObstructionStep(LEFSCHETZ, {}, "")


@pytest.mark.parametrize("spec", ["Q(8)", "A(4)", "S(4)", "Meta(5,2,4)", "C(10)", "Q(12)"])
def test_json_round_trip(group, spec):
    v = decide_pseudofree(group(spec), 4)
    w = Verdict.from_json(v.to_json())
    assert w == v
    assert json.loads(w.to_json()) == json.loads(v.to_json())


@pytest.mark.parametrize("spec", ["Q(8)", "A(5)", "S(4)", "Meta(7,3,2)", "D(12)", "Q(16)"])
def test_replay_verifies(group, spec):
    v = decide_pseudofree(group(spec), 3)
    rep = replay(v, group(spec))
    assert rep.ok
    assert len(rep.checks) == v.count_steps()


def test_replay_on_other_realization(group):
    v = decide_pseudofree(group("S(3)"), 3)
    assert replay(v, group("D(6)")).ok


def test_replay_catches_tampering(group):
    v = decide_pseudofree(group("Q(8)"), 3)
    bad = dataclasses.replace(v.trace[-1], params={**v.trace[-1].params, "collapsed_int": 1024})
    forged = dataclasses.replace(v, trace=v.trace[:-1] + (bad,))
    # the replay recomputes from the group, so it still agrees with the real numbers
    checks = replay(forged, group("Q(8)")).checks
    assert "2^13" in checks[-1].detail
    wrong_group = Verdict.from_dict({**v.to_dict(), "trace": [{"rule": CASE1_MERGE, "params": {"pair": ["C7", "C7"],
                                     "orders": [7, 7], "element_order": 7}, "citation": "x"}]})
    assert not replay(wrong_group, group("Q(8)")).ok


def test_explain(group):
    G = group("C(6)")
    text = explain(decide_pseudofree(G, 3), G)
    assert "Λ(g)=χ(X)=b₂+2=5" in text
    text = explain(decide_pseudofree(group("Q(8)"), 3), group("Q(8)"))
    assert "orders: 8192 vs 1024" in text
    assert "[ok]" in text and "FAIL" not in text


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CATALOG), st.integers(3, 7))
def test_main_theorem_property(entry, b2):
    v = decide_pseudofree(entry.group, b2)
    if is_cyclic(entry.group):
        assert v.kind == CYCLIC_SEMIFREE and v.fixed_points == b2 + 2
    else:
        assert v.kind == EXCLUDED
        assert replay(v, entry.group).ok


def test_survey_serial_and_parallel_agree():
    a = survey(CATALOG, 3)
    b = survey(CATALOG, 3, parallelism=2, memo=VerdictMemo())
    assert [r.to_dict() for r in a.rows] == [r.to_dict() for r in b.rows]
    assert a.consistent and not a.contradictions
    assert SurveyReport.from_dict(json.loads(json.dumps(a.to_dict()))).to_dict() == a.to_dict()


def test_survey_accepts_pairs_and_groups(group):
    rep = survey([("six", group("C(6)")), group("Q(8)")], 4)
    assert [r.name for r in rep.rows][0] == "six"
    assert rep.counts()[CYCLIC_SEMIFREE] == 1 and rep.counts()[EXCLUDED] == 1
