"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line, even under
pytest's output capture.  Run ``python tests/test_acceptance.py`` to get the
eight lines without pytest.
"""

from __future__ import annotations

import time

import pytest

from pseudofree.abelian import FactoredOrder
from pseudofree.borel import (
    accounting_consistency,
    collapsed_total_order,
    consistent_profiles,
    metacyclic_orbit_tables,
    orbit_structure_solve,
    semifree_cyclicity_test,
)
from pseudofree.cohomology.modules import CoefficientModule
from pseudofree.cohomology.oracle import oracle_cohomology
from pseudofree.cohomology.tables import formula_table
from pseudofree.engine import CYCLIC_SEMIFREE, EXCLUDED, VerdictMemo, replay, survey
from pseudofree.forms import NOT_GUARANTEED, collapse_guaranteed, form_catalog, reduce_mod_p, verify_witness
from pseudofree.group.catalog import full_catalog
from pseudofree.group.families import named_group
from pseudofree.group.lattice import all_subgroups
from pseudofree.group.structure import (
    INTERSECTING_PAIR,
    NORMAL_MAXIMAL,
    has_periodic_cohomology,
    is_cyclic,
    maximal_dichotomy,
)

_CACHE: dict = {}


def catalog():
    if "catalog" not in _CACHE:
        _CACHE["catalog"] = full_catalog()
    return _CACHE["catalog"]


def surveys():
    if "surveys" not in _CACHE:
        t0 = time.perf_counter()
        memo = VerdictMemo()
        _CACHE["surveys"] = {b2: survey(catalog(), b2, memo=memo) for b2 in (3, 4, 5)}
        _CACHE["survey_seconds"] = time.perf_counter() - t0
    return _CACHE["surveys"]


def report(capsys, n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    if capsys is None:
        print(line)
        return
    with capsys.disabled():
        print("\n" + line)


# ---------------------------------------------------------------------------


def check_1():
    t0 = time.perf_counter()
    cat = catalog()
    bad = []
    for e in cat:
        if e.order == 1:  # no proper subgroups; outside the statement
            continue
        try:
            res = maximal_dichotomy(e.group)
        except Exception as exc:  # any abort is a counterexample
            bad.append((e.name, repr(exc)))
            continue
        lat = all_subgroups(e.group)
        if res.kind == NORMAL_MAXIMAL:
            ok = res.witness[0] in lat.maximal and lat.is_normal(res.witness[0])
        elif res.kind == INTERSECTING_PAIR:
            a, b = res.witness
            ok = a in lat.maximal and b in lat.maximal and bool((lat.masks[a] & lat.masks[b]) >> 1)
        else:
            ok = False
        if not ok:
            bad.append((e.name, res.kind))
    dt = time.perf_counter() - t0
    ok = len(cat) >= 100 and not bad and dt < 60
    return ok, f"{len(cat) - 1} nontrivial groups (C1 skipped), {len(bad)} counterexamples {bad[:3]}, " \
               f"{dt:.1f}s (limit 60s)"


CRIT2_GROUPS = [f"C({n})" for n in range(1, 13)] + ["Meta(3,2,2)", "D(10)", "Meta(7,3,2)", "Q(8)"]


def check_2():
    t0 = time.perf_counter()
    assert named_group("D(10)").label == named_group("Meta(5,2,4)").label
    compared, bad = 0, []
    for spec in CRIT2_GROUPS:
        G = named_group(spec)
        depth = 5 if G.order <= 8 else 4
        lat = all_subgroups(G)
        # Z[G/H] for every subgroup H; H = G and H = 1 give Z and Z[G]
        modules = [CoefficientModule.trivial(), CoefficientModule.group_ring()]
        modules += [CoefficientModule.permutation(G, lat.masks[i]) for i in lat]
        for coeff in modules:
            f = formula_table(G, coeff, depth)
            o = oracle_cohomology(G, coeff, depth)
            compared += 1
            if not f.same_entries(o):
                bad.append((spec, coeff.descriptor(), f.first_difference(o)))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 600
    return ok, f"{compared} (group, module) tables, {len(bad)} mismatches {bad[:3]}, {dt:.1f}s (limit 600s)"


def check_3():
    bad = []
    for p, q in [(3, 2), (5, 2), (7, 3)]:
        tables = metacyclic_orbit_tables(p, q, 4 * q + 2)
        for m in range(7):
            got = collapsed_total_order(tables.fixed, m, 4 * q)
            if got != FactoredOrder({p: 2, q: m + 2}):
                bad.append(f"({p},{q}) m={m} n={4 * q}: {got}")
            got = collapsed_total_order(tables.fixed, m, 4 * q + 2)
            if got != FactoredOrder({p: m, q: m + 2}):
                bad.append(f"({p},{q}) m={m} n={4 * q + 2}: {got}")
    detail = f"{42 - len(bad)}/42 identities hold"
    if bad:
        detail += f"; failing: {bad[0]} ... ({len(bad)} cases, all (7,3) at n=4q: H^8 = Z/3, not Z/21)"
    return not bad, detail


def check_4():
    bad = []
    for p, q in [(3, 2), (5, 2)]:
        tables = metacyclic_orbit_tables(p, q, 4 * q + 2)
        for m in range(3):
            sol = orbit_structure_solve(p, q, m)
            if sol is None or sol.as_tuple() != (2 - m, 2 * m, m):
                bad.append((p, q, m, sol))
                continue
            if not accounting_consistency(tables, sol, m, (4 * q, 4 * q + 2)).consistent:
                bad.append((p, q, m, "accounting"))
        for m in range(3, 11):
            if orbit_structure_solve(p, q, m) is not None:
                bad.append((p, q, m, "solvable"))
        if consistent_profiles(p, q, 3, bound=20):
            bad.append((p, q, 3, "a profile <= 20 is consistent"))
    # for odd q only the absence half carries over
    for m in range(3, 11):
        if orbit_structure_solve(7, 3, m) is not None:
            bad.append((7, 3, m, "solvable"))
    if consistent_profiles(7, 3, 3, bound=20):
        bad.append((7, 3, 3, "a profile <= 20 is consistent"))
    return not bad, f"(3,2), (5,2): solutions (2-m,2m,m) for m<=2, none for 3<=m<=10, m=3 exhaustive to 20; " \
                    f"(7,3): none for m>=3; {len(bad)} failures {bad[:3]}"


def check_5():
    bad, n = [], 0
    q8 = named_group("Q(8)")
    r = semifree_cyclicity_test(q8, 3)
    if (r.collapsed, r.fixed_set) != (FactoredOrder({2: 13}), FactoredOrder({2: 10})):
        bad.append(("Q8 orders", str(r.collapsed), str(r.fixed_set)))
    for e in catalog():
        G = e.group
        if G.order == 1 or not has_periodic_cohomology(G):
            continue
        n += 1
        abelian = G.is_abelian
        if abelian and not is_cyclic(G):
            bad.append((e.name, "abelian but not cyclic"))
        for b2 in range(1, 7):
            if semifree_cyclicity_test(G, b2).passed != abelian:
                bad.append((e.name, b2))
    return not bad, f"{n} periodic groups x b2 in 1..6, Q8 at b2=3: {r.collapsed} vs {r.fixed_set}; " \
                    f"{len(bad)} failures {bad[:3]}"


def check_6():
    bad, witnesses = [], 0
    for f in form_catalog():
        for p in (2, 3, 5, 7, 11, 13):
            fm = reduce_mod_p(f, p)
            v = collapse_guaranteed(fm)
            ng = v.outcome == NOT_GUARANTEED
            if ng:
                witnesses += 1
                if not verify_witness(fm, v):
                    bad.append((f.name, p, "witness"))
            if p not in (2, 3):
                expect = False
            elif p == 3:
                expect = True if f.rank == 1 else False if f.rank >= 2 else None
            else:
                expect = True if f.rank == 0 or f.name == "H" else False if f.rank >= 3 else None
            if expect is not None and ng != expect:
                bad.append((f.name, p, v.outcome))
    return not bad, f"{len(form_catalog())} forms x 6 primes, {witnesses} witnesses re-verified; " \
                    f"{len(bad)} failures {bad[:3]}"


def check_7():
    reps = surveys()
    bad = []
    for b2, rep in reps.items():
        for row in rep.rows:
            v = row.verdict
            if v is None:
                bad.append((row.name, b2, row.error))
            elif is_cyclic(catalog()[[e.name for e in catalog()].index(row.name)].group):
                if v.kind != CYCLIC_SEMIFREE or v.fixed_points != b2 + 2:
                    bad.append((row.name, b2, v.kind))
            elif v.kind != EXCLUDED:
                bad.append((row.name, b2, v.kind))
        bad += [(c, b2, "contradiction") for c in rep.contradictions]
    dt = _CACHE["survey_seconds"]
    counts = {b2: rep.counts() for b2, rep in reps.items()}
    ok = not bad and dt < 300
    return ok, f"b2 in 3,4,5 over {len(catalog())} groups: {counts[3]}; {len(bad)} failures {bad[:3]}, " \
               f"{dt:.1f}s (limit 300s)"


def check_8():
    reps = surveys()
    groups = {e.name: e.group for e in catalog()}
    total, failed = 0, []
    for b2, rep in reps.items():
        for row in rep.rows:
            if row.verdict is None:
                continue
            r = replay(row.verdict, groups[row.name])
            total += len(r.checks)
            failed += [(row.name, b2, c.rule, c.detail) for c in r.checks if not c.ok]
            if len(r.checks) != row.verdict.count_steps():
                failed.append((row.name, b2, "step count", len(r.checks)))
    return not failed, f"{total - len(failed)}/{total} emitted steps re-verified {failed[:3]}"


CHECKS = {1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5, 6: check_6, 7: check_7, 8: check_8}


def _run(capsys, n):
    ok, detail = CHECKS[n]()
    report(capsys, n, ok, detail)
    assert ok, detail


def test_criterion_1_dichotomy(capsys):
    _run(capsys, 1)


def test_criterion_2_tables_vs_oracle(capsys):
    _run(capsys, 2)


@pytest.mark.xfail(strict=True, reason="p^2 q^(m+2) at n=4q needs H^(4q-4)(G) = Z/pq, true only for q = 2; "
                   "for (7,3) the oracle gives H^8 = Z/3")
def test_criterion_3_order_identities(capsys):
    _run(capsys, 3)


def test_criterion_4_orbit_equations(capsys):
    _run(capsys, 4)


def test_criterion_5_cyclicity(capsys):
    _run(capsys, 5)


def test_criterion_6_collapse(capsys):
    _run(capsys, 6)


def test_criterion_7_survey(capsys):
    _run(capsys, 7)


def test_criterion_8_replay(capsys):
    _run(capsys, 8)


if __name__ == "__main__":
    for n, check in CHECKS.items():
        report(None, n, *check())
