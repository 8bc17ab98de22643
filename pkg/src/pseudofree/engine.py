"""Decision pipeline: is a pseudofree, homologically trivial action excluded?

``decide_pseudofree(G, b2)`` rebuilds the inductive argument for b2 >= 3:

* cyclic G acts semifreely with b2 + 2 fixed points (Lefschetz count);
* if some maximal subgroup is excluded, so is G;
* otherwise every maximal subgroup is cyclic, and either two maximal
  subgroups share a nontrivial element (G would act semifreely, which the
  degree-6 count forbids unless G is abelian), or a maximal subgroup is
  normal and G contains one of the forbidden subgroups.

Each step records its parameters by subgroup label, so a trace can be
replayed against any realization of the same group.
"""

from __future__ import annotations

import json
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .borel import lefschetz_number, orbit_structure_solve, pseudofree_fixed_count, semifree_cyclicity_test
from .errors import InternalContradiction, InvalidParameters, PseudofreeError
from .group.lattice import all_subgroups
from .group.permgroup import PermGroup
from .group.structure import (
    ELEM_ABELIAN_RANK2,
    GENERALIZED_QUATERNION,
    INTERSECTING_PAIR,
    NONABELIAN_PQ,
    find_forbidden_subgroup,
    has_periodic_cohomology,
    is_cyclic,
    maximal_dichotomy,
    metacyclic_shape,
    p_rank,
)

CYCLIC_SEMIFREE = "CyclicSemifree"
EXCLUDED = "Excluded"
OUT_OF_SCOPE = "OutOfScope"

LEFSCHETZ = "LefschetzCount"
SUBGROUP_EXCLUDED = "SubgroupExcluded"
CASE1_MERGE = "Case1Merge"
NORMAL_EXTENSION = "NormalMaximalExtension"
METACYCLIC_INFEASIBLE = "MetacyclicOrbitInfeasible"
ELEMAB_CONTRADICTION = "ElemAbelianContradiction"
QUATERNION_CENTER = "QuaternionCenterCase1"
CYCLICITY_FAIL = "SemifreeCyclicityFail"

CITATIONS = {
    LEFSCHETZ: "Lefschetz fixed point formula: |X^g| = chi(X^g) = Lambda(g) = chi(X) = b2 + 2",
    SUBGROUP_EXCLUDED: "induction on |G|: a subgroup that cannot act excludes every group containing it",
    CASE1_MERGE: "maximal subgroups sharing a nontrivial element have one fixed set, so their join G acts semifreely",
    NORMAL_EXTENSION: "maximal-subgroup dichotomy: a normal maximal C_k gives 1 -> C_k -> G -> C_q -> 1",
    METACYCLIC_INFEASIBLE: "nonabelian groups of order pq: orbit accounting in degrees 4q and 4q+2 forces b2 <= 2",
    ELEMAB_CONTRADICTION: "C_p x C_p fixes b2 + 2 isolated points once the mod-p sequence collapses, "
    "but an isolated fixed point needs periodic cohomology",
    QUATERNION_CENTER: "a generalized quaternion group has a central involution lying in every maximal subgroup",
    CYCLICITY_FAIL: "semifree actions with b2 >= 1 force |G/[G,G]| = |G| by counting H^6",
}

SMALL_B2_EXCEPTIONS = (
    "b2 = 0 (S^4): suspending a free linear action on S^3 gives a pseudofree action, so every such group occurs",
    "b2 = 1 (CP^2): most actions are semifree by the Wilczynski and Hambleton-Lee classifications, "
    "but C3xC3 acts pseudofreely and not semifreely",
    "b2 = 2 (S^2xS^2): the polyhedral groups C_n, D_2n, A4, S4 and A5 act pseudofreely via their actions on S^2",
)


@dataclass(frozen=True)
class ObstructionStep:
    rule: str
    params: dict
    citation: str
    child: Verdict | None = field(default=None, compare=True)

    def __post_init__(self):
        if not self.citation:
            raise InvalidParameters("every step needs a citation")

    def summary(self) -> str:
        p = self.params
        if self.rule == SUBGROUP_EXCLUDED:
            return f"{self.rule}({p['subgroup']})"
        if self.rule == CASE1_MERGE:
            return f"{self.rule}({p['pair'][0]}, {p['pair'][1]})"
        if self.rule == NORMAL_EXTENSION:
            s = p["shape"]
            return f"{self.rule}(k={s['k']}, q={s['q']}, r={s['r']}, s={s['s']})"
        if self.rule == METACYCLIC_INFEASIBLE:
            return f"{self.rule}({p['p']},{p['q']},{p['m']})"
        if self.rule == ELEMAB_CONTRADICTION:
            return f"{self.rule}({p['p']})"
        if self.rule == CYCLICITY_FAIL:
            return f"{self.rule}({p['collapsed_int']} vs {p['fixed_set_int']})"
        if self.rule == LEFSCHETZ:
            return f"{self.rule}({p['value']})"
        return self.rule

    def to_dict(self) -> dict:
        d = {"rule": self.rule, "params": self.params, "citation": self.citation}
        if self.child is not None:
            d["child"] = self.child.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ObstructionStep:
        child = d.get("child")
        return cls(d["rule"], d["params"], d["citation"], None if child is None else Verdict.from_dict(child))


def _step(rule: str, child: Verdict | None = None, **params) -> ObstructionStep:
    return ObstructionStep(rule, params, CITATIONS[rule], child)


@dataclass(frozen=True)
class Verdict:
    kind: str
    group: str
    order: int
    b2: int
    fixed_points: int | None = None
    trace: tuple[ObstructionStep, ...] = ()
    reason: str = ""
    exceptions: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "trace", tuple(self.trace))
        object.__setattr__(self, "exceptions", tuple(self.exceptions))
        if self.kind not in (CYCLIC_SEMIFREE, EXCLUDED, OUT_OF_SCOPE):
            raise InvalidParameters(f"unknown verdict kind {self.kind!r}")
        if self.kind == EXCLUDED and not self.trace:
            raise InvalidParameters("an Excluded verdict needs a trace")
        if self.kind == CYCLIC_SEMIFREE and self.fixed_points != self.b2 + 2:
            raise InvalidParameters("CyclicSemifree must report b2 + 2 fixed points")

    def rules(self, deep: bool = False) -> list[str]:
        out = []
        for s in self.trace:
            out.append(s.rule)
            if deep and s.child is not None:
                out += s.child.rules(deep=True)
        return out

    def leaf(self) -> ObstructionStep | None:
        """The last step, following SubgroupExcluded down to the obstruction."""
        if not self.trace:
            return None
        last = self.trace[-1]
        if last.child is not None and last.child.trace:
            return last.child.leaf()
        return last

    def count_steps(self) -> int:
        return sum(1 + (s.child.count_steps() if s.child is not None else 0) for s in self.trace)

    def describe(self) -> str:
        if self.kind == CYCLIC_SEMIFREE:
            return f"CyclicSemifree({self.fixed_points})"
        if self.kind == EXCLUDED:
            return f"Excluded via {self.leaf().summary()}"
        return f"OutOfScope(b2={self.b2})"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "group": self.group,
            "order": self.order,
            "b2": self.b2,
            "fixed_points": self.fixed_points,
            "trace": [s.to_dict() for s in self.trace],
            "reason": self.reason,
            "exceptions": list(self.exceptions),
        }

    @classmethod
    def from_dict(cls, d: dict) -> Verdict:
        return cls(
            d["kind"], d["group"], d["order"], d["b2"], d.get("fixed_points"),
            tuple(ObstructionStep.from_dict(s) for s in d.get("trace", ())),
            d.get("reason", ""), tuple(d.get("exceptions", ())),
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> Verdict:
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# the decision


class VerdictMemo:
    """Insert-only map (label, b2) -> Verdict; concurrent equal inserts are harmless."""

    def __init__(self):
        self._data: dict[tuple[str, int], Verdict] = {}
        self._lock = threading.Lock()

    def get(self, key):
        return self._data.get(key)

    def put(self, key, verdict: Verdict) -> Verdict:
        with self._lock:
            return self._data.setdefault(key, verdict)

    def __len__(self):
        return len(self._data)

    def clear(self):
        with self._lock:
            self._data.clear()


GLOBAL_MEMO = VerdictMemo()


def _out_of_scope(G: PermGroup, b2: int) -> Verdict:
    return Verdict(
        OUT_OF_SCOPE, G.label, G.order, b2,
        reason=f"the obstruction argument needs b2 >= 3, got {b2}",
        exceptions=SMALL_B2_EXCEPTIONS,
    )


def _excluded(G: PermGroup, b2: int, steps) -> Verdict:
    return Verdict(EXCLUDED, G.label, G.order, b2, None, tuple(steps))


def _elem_abelian_step(G: PermGroup, b2: int, p: int, label: str) -> ObstructionStep:
    return _step(ELEMAB_CONTRADICTION, p=p, subgroup=label, b2=b2)


def _decide(G: PermGroup, b2: int, memo: VerdictMemo) -> Verdict:
    if is_cyclic(G):
        n = pseudofree_fixed_count(b2)
        step = _step(LEFSCHETZ, t0=1, t2=b2, t4=1, value=lefschetz_number(1, b2, 1))
        return Verdict(CYCLIC_SEMIFREE, G.label, G.order, b2, n, (step,))

    lat = all_subgroups(G)
    for i in lat.maximal_sorted():
        child = decide_pseudofree(lat.subgroup_group(i), b2, memo)
        if child.kind == EXCLUDED:
            step = _step(SUBGROUP_EXCLUDED, child, subgroup=lat.label(i), order=lat.order(i))
            return _excluded(G, b2, [step])

    # every maximal subgroup is cyclic from here on
    steps = []
    forbidden = find_forbidden_subgroup(G)
    dich = maximal_dichotomy(G, prefer="pair")
    if dich.kind == INTERSECTING_PAIR:
        if forbidden is not None and forbidden.kind == GENERALIZED_QUATERNION:
            steps.append(_step(QUATERNION_CENTER, subgroup=forbidden.label, order=forbidden.order))
        i, j = dich.witness
        steps.append(_step(
            CASE1_MERGE,
            pair=[lat.label(i), lat.label(j)],
            orders=[lat.order(i), lat.order(j)],
            element_order=int(G.element_orders[dich.element]),
        ))
        if has_periodic_cohomology(G):
            if G.is_abelian:
                raise InternalContradiction(f"{G.display_name()}: abelian, periodic and not cyclic")
            rep = semifree_cyclicity_test(G, b2)
            if rep.passed:  # pragma: no cover - passes only for abelian G
                raise InternalContradiction(f"{G.display_name()}: nonabelian but the H^6 count balances")
            steps.append(_step(
                CYCLICITY_FAIL,
                b2=b2,
                collapsed=rep.collapsed.to_dict(),
                fixed_set=rep.fixed_set.to_dict(),
                collapsed_int=rep.collapsed.to_int(),
                fixed_set_int=rep.fixed_set.to_int(),
            ))
            return _excluded(G, b2, steps)
        if G.is_abelian and forbidden is not None and forbidden.kind == ELEM_ABELIAN_RANK2:
            steps.append(_elem_abelian_step(G, b2, forbidden.params["p"], forbidden.label))
            return _excluded(G, b2, steps)
        raise InternalContradiction(
            f"{G.display_name()}: maximal subgroups meet nontrivially but G is not periodic "
            "and has no rank-2 elementary abelian witness"
        )

    shape = metacyclic_shape(G)
    if shape is None:
        raise InternalContradiction(f"{G.display_name()}: normal maximal subgroup is not cyclic of prime index")
    (n_idx,) = dich.witness
    steps.append(_step(NORMAL_EXTENSION, subgroup=lat.label(n_idx), shape=shape.to_dict()))
    if forbidden is None:
        raise InternalContradiction(f"{G.display_name()}: non-cyclic extension with none of the forbidden subgroups")
    if forbidden.kind == NONABELIAN_PQ:
        p, q = forbidden.params["p"], forbidden.params["q"]
        if orbit_structure_solve(p, q, b2) is not None:
            raise InternalContradiction(f"orbit equations for ({p},{q}) are solvable at b2 = {b2}")
        steps.append(_step(METACYCLIC_INFEASIBLE, p=p, q=q, m=b2, subgroup=forbidden.label))
    elif forbidden.kind == ELEM_ABELIAN_RANK2:
        steps.append(_elem_abelian_step(G, b2, forbidden.params["p"], forbidden.label))
    else:
        raise InternalContradiction(
            f"{G.display_name()}: quaternion subgroup found although maximal subgroups meet trivially"
        )
    return _excluded(G, b2, steps)


def decide_pseudofree(G: PermGroup, b2: int, memo: VerdictMemo | None = None) -> Verdict:
    """Verdict on pseudofree homologically trivial G-actions with this b2.

    >>> from pseudofree.group.families import named_group
    >>> decide_pseudofree(named_group("C(6)"), 3).describe()
    'CyclicSemifree(5)'
    >>> decide_pseudofree(named_group("Meta(3,2,2)"), 3).describe()
    'Excluded via MetacyclicOrbitInfeasible(3,2,3)'
    """
    if b2 < 0:
        raise InvalidParameters("b2 must be >= 0")
    if b2 < 3:
        return _out_of_scope(G, b2)
    memo = GLOBAL_MEMO if memo is None else memo
    key = (G.label, b2)
    hit = memo.get(key)
    if hit is not None:
        return hit
    return memo.put(key, _decide(G, b2, memo))


# ---------------------------------------------------------------------------
# replay


@dataclass(frozen=True)
class StepCheck:
    rule: str
    group: str
    depth: int
    ok: bool
    detail: str

    def to_dict(self) -> dict:
        return {"rule": self.rule, "group": self.group, "depth": self.depth, "ok": self.ok, "detail": self.detail}


@dataclass(frozen=True)
class ReplayReport:
    checks: tuple[StepCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def _subgroups_labelled(G: PermGroup, label: str, maximal_only: bool = False) -> list[int]:
    lat = all_subgroups(G)
    pool = lat.maximal_sorted() if maximal_only else list(lat)
    return [i for i in pool if lat.label(i) == label]


def _replay_step(G: PermGroup, b2: int, step: ObstructionStep, depth: int, out: list) -> None:
    p = step.params
    lat = all_subgroups(G)
    ok, detail = False, ""
    descend = None
    try:
        if step.rule == LEFSCHETZ:
            val = lefschetz_number(p["t0"], p["t2"], p["t4"])
            ok = is_cyclic(G) and val == p["value"] == pseudofree_fixed_count(b2) and p["t2"] == b2
            detail = f"Lambda = {p['t0']} + {p['t2']} + {p['t4']} = {val}"
        elif step.rule == SUBGROUP_EXCLUDED:
            cands = _subgroups_labelled(G, p["subgroup"], maximal_only=True)
            ok = bool(cands) and step.child is not None and step.child.kind == EXCLUDED
            detail = f"maximal subgroup {p['subgroup']} found" if cands else f"no maximal subgroup {p['subgroup']}"
            if ok:
                descend = lat.subgroup_group(cands[0])
        elif step.rule == CASE1_MERGE:
            a, b = p["pair"]
            ok = False
            for i in _subgroups_labelled(G, a, True):
                for j in _subgroups_labelled(G, b, True):
                    common = lat.masks[i] & lat.masks[j] & ~1
                    joined = [int(x) for x in lat.members(i)] + [int(x) for x in lat.members(j)]
                    if i != j and common and G.closure_mask(joined) == G.full_mask:
                        ok = True
                        break
                if ok:
                    break
            detail = f"{a} and {b} meet nontrivially and generate G" if ok else "no such pair"
        elif step.rule == NORMAL_EXTENSION:
            shape = metacyclic_shape(G)
            normal = [i for i in _subgroups_labelled(G, p["subgroup"], True) if lat.is_normal(i)]
            ok = shape is not None and shape.to_dict() == p["shape"] and bool(normal)
            detail = f"shape {shape.to_dict() if shape else None}"
        elif step.rule == METACYCLIC_INFEASIBLE:
            P, Q, m = p["p"], p["q"], p["m"]
            subs = [i for i in _subgroups_labelled(G, p["subgroup"]) if lat.order(i) == P * Q
                    and not lat.subgroup_group(i).is_abelian]
            sol = orbit_structure_solve(P, Q, m)
            ok = bool(subs) and sol is None and m == b2
            detail = f"nonabelian subgroup of order {P * Q}: {bool(subs)}; orbit equations solvable: {sol is not None}"
        elif step.rule == ELEMAB_CONTRADICTION:
            P = p["p"]
            subs = _subgroups_labelled(G, p["subgroup"])
            H = lat.subgroup_group(subs[0]) if subs else None
            elem = H is not None and H.order == P * P and not is_cyclic(H) and p_rank(H, P) == 2
            clears = b2 >= 3 and not (P == 3 and b2 == 1) and not (P == 2 and b2 in (0, 2))
            ok = elem and clears and not has_periodic_cohomology(H)
            detail = f"C{P}xC{P} present: {elem}; b2 = {b2} clears the small exceptions: {clears}"
        elif step.rule == QUATERNION_CENTER:
            subs = _subgroups_labelled(G, p["subgroup"])
            ok = False
            if subs:
                mem = lat.members(subs[0])
                invol = [int(x) for x in mem if G.element_orders[x] == 2]
                if len(invol) == 1:
                    z = invol[0]
                    ok = all(lat.masks[i] >> z & 1 for i in lat.maximal)
            detail = "unique involution lies in every maximal subgroup" if ok else "central involution check failed"
        elif step.rule == CYCLICITY_FAIL:
            rep = semifree_cyclicity_test(G, p["b2"])
            ok = (not rep.passed and rep.collapsed.to_dict() == p["collapsed"]
                  and rep.fixed_set.to_dict() == p["fixed_set"])
            detail = f"|H^6(X_G)| = {rep.collapsed} vs |H^6(X^G x B_G)| = {rep.fixed_set}"
        else:
            detail = f"unknown rule {step.rule!r}"
    except PseudofreeError as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    out.append(StepCheck(step.rule, G.label, depth, ok, detail))
    if descend is not None:
        for s in step.child.trace:
            _replay_step(descend, b2, s, depth + 1, out)


def replay(verdict: Verdict, G: PermGroup) -> ReplayReport:
    """Re-run the operation behind every step of ``verdict`` on G."""
    if verdict.group != G.label:
        raise InvalidParameters(f"verdict is for {verdict.group}, not {G.label}")
    out: list[StepCheck] = []
    for s in verdict.trace:
        _replay_step(G, verdict.b2, s, 0, out)
    return ReplayReport(tuple(out))


def explain(verdict: Verdict, G: PermGroup | None = None) -> str:
    """Readable trace; with G, each step also shows its replayed check."""
    lines = [f"{verdict.group} (order {verdict.order}), b2 = {verdict.b2}: {verdict.describe()}"]
    if verdict.kind == CYCLIC_SEMIFREE:
        n = verdict.fixed_points
        lines.append(f"  Lefschetz: Λ(g)=χ(X)=b₂+2={n}; G acts semifreely with {n} isolated fixed points")
    if verdict.kind == OUT_OF_SCOPE:
        lines.append(f"  {verdict.reason}. Known small-b2 cases:")
        lines += [f"    - {e}" for e in verdict.exceptions]
    checks = iter(replay(verdict, G).checks) if G is not None else None

    def emit(v: Verdict, depth: int):
        for s in v.trace:
            pad = "  " * (depth + 1)
            lines.append(f"{pad}{s.summary()}")
            lines.append(f"{pad}  because: {s.citation}")
            if s.rule == CYCLICITY_FAIL:
                lines.append(f"{pad}  orders: {s.params['collapsed_int']} vs {s.params['fixed_set_int']}")
            if s.child is not None:
                emit(s.child, depth + 1)

    emit(verdict, 0)
    if checks is not None:
        lines.append("  replay:")
        for c in checks:
            lines.append(f"  {'  ' * c.depth}[{'ok' if c.ok else 'FAIL'}] {c.rule} on {c.group}: {c.detail}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# survey


@dataclass(frozen=True)
class SurveyRow:
    name: str
    label: str
    order: int
    cyclic: bool
    verdict: Verdict | None
    error: str | None = None

    @property
    def consistent(self) -> bool:
        if self.verdict is None:
            return False
        if self.cyclic:
            return self.verdict.kind == CYCLIC_SEMIFREE and self.verdict.fixed_points == self.verdict.b2 + 2
        return self.verdict.kind == EXCLUDED

    def to_dict(self) -> dict:
        v = self.verdict
        return {
            "name": self.name,
            "label": self.label,
            "order": self.order,
            "cyclic": self.cyclic,
            "verdict": None if v is None else v.kind,
            "fixed_points": None if v is None else v.fixed_points,
            "trace_length": 0 if v is None else v.count_steps(),
            "summary": None if v is None else v.describe(),
            "error": self.error,
            "consistent": self.consistent,
            "detail": None if v is None else v.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> SurveyRow:
        det = d.get("detail")
        return cls(d["name"], d["label"], d["order"], d["cyclic"], None if det is None else Verdict.from_dict(det), d.get("error"))


@dataclass(frozen=True)
class SurveyReport:
    b2: int
    rows: tuple[SurveyRow, ...]

    @property
    def contradictions(self) -> list[SurveyRow]:
        return [r for r in self.rows if r.error is not None]

    @property
    def consistent(self) -> bool:
        return all(r.consistent for r in self.rows)

    def counts(self) -> dict[str, int]:
        out = {CYCLIC_SEMIFREE: 0, EXCLUDED: 0, OUT_OF_SCOPE: 0, "error": 0}
        for r in self.rows:
            out["error" if r.verdict is None else r.verdict.kind] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "b2": self.b2,
            "consistent": self.consistent,
            "counts": self.counts(),
            "rows": [r.to_dict() for r in self.rows],
        }

    @classmethod
    def from_dict(cls, d: dict) -> SurveyReport:
        return cls(d["b2"], tuple(SurveyRow.from_dict(r) for r in d["rows"]))


def _survey_one(name: str, G: PermGroup, b2: int, memo: VerdictMemo) -> SurveyRow:
    try:
        v = decide_pseudofree(G, b2, memo)
        return SurveyRow(name, G.label, G.order, is_cyclic(G), v)
    except InternalContradiction as exc:
        return SurveyRow(name, G.label, G.order, is_cyclic(G), None, f"InternalContradiction: {exc}")


def _survey_worker(args):
    from .group.permgroup import group_from_generators
    from .group.permutation import Permutation

    name, degree, gens, b2 = args
    G = group_from_generators([Permutation(g) for g in gens], degree=degree, name=name)
    return _survey_one(name, G, b2, GLOBAL_MEMO).to_dict()


def survey(entries, b2: int, parallelism: int = 1, memo: VerdictMemo | None = None) -> SurveyReport:
    """Decide every group in ``entries`` (groups or (name, group) pairs).

    Rows come back in input order whatever the parallelism.
    """
    if b2 < 3:
        raise InvalidParameters("survey needs b2 >= 3")
    named = []
    for e in entries:
        if isinstance(e, PermGroup):
            named.append((e.display_name(), e))
        elif isinstance(e, tuple):
            named.append(e)
        else:
            named.append((e.name, e.group))
    if parallelism <= 1 or len(named) < 2:
        memo = GLOBAL_MEMO if memo is None else memo
        return SurveyReport(b2, tuple(_survey_one(n, G, b2, memo) for n, G in named))
    jobs = [(n, G.degree, [tuple(g.images) for g in G.generators], b2) for n, G in named]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        rows = list(pool.map(_survey_worker, jobs))
    return SurveyReport(b2, tuple(SurveyRow.from_dict(r) for r in rows))
