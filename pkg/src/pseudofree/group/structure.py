"""Structural predicates and the maximal-subgroup dichotomy."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import factorint, isprime

from ..abelian import FiniteAbelianGroup
from ..errors import InternalContradiction, InvalidParameters
from .lattice import all_subgroups
from .permgroup import PermGroup, mask_from_indices


def is_cyclic(G: PermGroup) -> bool:
    return bool((G.element_orders == G.order).any())


def center_mask(G: PermGroup) -> int:
    m = G.mul
    gens = list(G.generator_indices)
    if not gens:
        return G.full_mask
    ok = np.ones(G.order, dtype=bool)
    for s in gens:
        ok &= m[:, s] == m[s, :]
    return mask_from_indices(np.nonzero(ok)[0].tolist())


def commutator_mask(G: PermGroup) -> int:
    cached = getattr(G, "_commutator_mask", None)
    if cached is not None:
        return cached
    if G.is_abelian:
        out = 1
    else:
        m, inv = G.mul, G.inv
        # [a, b] = a b a^-1 b^-1 for all pairs; these generate G'
        comm = m[m[m, inv[:, None]], inv[None, :]]
        out = G.closure_mask(np.unique(comm).tolist())
    G._commutator_mask = out
    return out


def center(G: PermGroup) -> PermGroup:
    return G.subgroup(center_mask(G))


def commutator_subgroup(G: PermGroup) -> PermGroup:
    return G.subgroup(commutator_mask(G))


def _powers(G: PermGroup, k: int) -> np.ndarray:
    """Index array of g^k for every g."""
    m = G.mul
    result = np.zeros(G.order, dtype=np.int64)
    base = np.arange(G.order)
    while k:
        if k & 1:
            result = m[result, base]
        base = m[base, base]
        k >>= 1
    return result


def abelianization(G: PermGroup) -> FiniteAbelianGroup:
    """G/[G,G] in invariant-factor form.

    An abelian group is determined by how many elements x satisfy
    x^(p^j) = 1; in the quotient that count is |{g : g^(p^j) in G'}| / |G'|.
    """
    cached = getattr(G, "_abelianization", None)
    if cached is not None:
        return cached
    K = commutator_mask(G)
    k = bin(K).count("1")
    q = G.order // k
    in_k = np.array([K >> i & 1 for i in range(G.order)], dtype=bool)
    pieces = []
    for p, e in factorint(q).items():
        prev = 0
        ranks = []
        j = 1
        total = 0
        while total < e:
            cnt = int(in_k[_powers(G, p**j)].sum()) // k
            total = round(np.log(cnt) / np.log(p))
            ranks.append(total - prev)
            prev = total
            j += 1
        # ranks[j-1] = number of cyclic p-factors of exponent >= j
        for j in range(len(ranks)):
            nxt = ranks[j + 1] if j + 1 < len(ranks) else 0
            pieces.extend([p ** (j + 1)] * (ranks[j] - nxt))
    out = FiniteAbelianGroup.from_cyclic_orders(pieces)
    G._abelianization = out
    return out


# ---------------------------------------------------------------------------
# periodicity and p-rank


def _elem_abelian_rank2_pair(G: PermGroup, p: int) -> tuple[int, int] | None:
    """Commuting a, b of order p with b not in <a> (an element scan)."""
    orders = G.element_orders
    P = np.nonzero(orders == p)[0]
    m = G.mul
    for a in P.tolist():
        cyc = {0}
        x = a
        while x != 0:
            cyc.add(x)
            x = int(m[x, a])
        for b in P.tolist():
            if b not in cyc and m[a, b] == m[b, a]:
                return a, b
    return None


def has_periodic_cohomology(G: PermGroup) -> bool:
    """True iff G has no subgroup C_p x C_p, found by scanning element pairs."""
    return all(_elem_abelian_rank2_pair(G, p) is None for p in factorint(G.order))


def _is_elementary_abelian(G: PermGroup, members: np.ndarray, p: int) -> bool:
    orders = G.element_orders[members]
    if not np.all((orders == 1) | (orders == p)):
        return False
    sub = G.mul[np.ix_(members, members)]
    return bool(np.array_equal(sub, sub.T))


def p_rank(G: PermGroup, p: int) -> int:
    """Largest r with (C_p)^r <= G, by a scan of the subgroup lattice."""
    if not isprime(p):
        raise InvalidParameters(f"{p} is not prime")
    if G.order % p:
        return 0
    lat = all_subgroups(G)
    best = 0
    for i in lat:
        o = lat.order(i)
        f = factorint(o)
        if set(f) == {p} and f[p] > best and _is_elementary_abelian(G, lat.members(i), p):
            best = f[p]
    return best


# ---------------------------------------------------------------------------
# forbidden subgroups


NONABELIAN_PQ = "NonabelianMetacyclicPQ"
ELEM_ABELIAN_RANK2 = "ElemAbelianRank2"
GENERALIZED_QUATERNION = "GeneralizedQuaternion"


@dataclass(frozen=True)
class ForbiddenSubgroup:
    kind: str
    index: int  # into the lattice of the group it was found in
    label: str
    order: int
    params: dict = field(default_factory=dict, compare=False)

    def describe(self) -> str:
        if self.kind == NONABELIAN_PQ:
            return f"{self.kind}(p={self.params['p']}, q={self.params['q']})"
        if self.kind == ELEM_ABELIAN_RANK2:
            return f"{self.kind}({self.params['p']})"
        return f"{self.kind}(order {self.order})"


def _classify(G: PermGroup, members: np.ndarray, order: int) -> tuple[str, dict] | None:
    f = factorint(order)
    orders = G.element_orders[members]
    cyclic = bool((orders == order).any())
    if cyclic:
        return None
    sub = G.mul[np.ix_(members, members)]
    abelian = bool(np.array_equal(sub, sub.T))
    if len(f) == 2 and all(e == 1 for e in f.values()) and not abelian:
        # the normal Sylow subgroup is the one for the larger prime
        p, q = max(f), min(f)
        return NONABELIAN_PQ, {"p": p, "q": q}
    if len(f) == 1:
        ((p, e),) = f.items()
        if e == 2:
            return ELEM_ABELIAN_RANK2, {"p": p}
        if p == 2 and e >= 3 and int((orders == 2).sum()) == 1:
            return GENERALIZED_QUATERNION, {"p": 2}
    return None


def find_forbidden_subgroup(G: PermGroup) -> ForbiddenSubgroup | None:
    """Smallest subgroup of one of the three forbidden kinds, or None.

    Candidates are ranked by (order, canonical label, mask), so the answer is
    reproducible.
    """
    lat = all_subgroups(G)
    found = []
    best_order = None
    for i in lat:  # lattice indices ascend in order
        o = lat.order(i)
        if best_order is not None and o > best_order:
            break
        hit = _classify(G, lat.members(i), o)
        if hit is not None:
            found.append((i, hit))
            best_order = o
    if not found:
        return None
    i, (kind, params) = min(found, key=lambda t: lat.sort_key(t[0]))
    return ForbiddenSubgroup(kind, i, lat.label(i), lat.order(i), params)


# ---------------------------------------------------------------------------
# the maximal-subgroup dichotomy


NORMAL_MAXIMAL = "NormalMaximal"
INTERSECTING_PAIR = "IntersectingPair"


@dataclass(frozen=True)
class DichotomyResult:
    kind: str
    witness: tuple[int, ...]  # one or two maximal-subgroup indices
    element: int | None = None  # shared non-identity element (IntersectingPair)
    labels: tuple[str, ...] = ()

    def to_dict(self, G: PermGroup | None = None) -> dict:
        d = {"kind": self.kind, "witness": list(self.witness), "labels": list(self.labels)}
        if self.element is not None:
            d["element"] = self.element
            if G is not None:
                d["element_cycles"] = G.elements[self.element].cycle_string()
        return d


def _intersecting_pair(G: PermGroup) -> DichotomyResult | None:
    lat = all_subgroups(G)
    maxs = lat.maximal_sorted()
    for a in range(len(maxs)):
        for b in range(a + 1, len(maxs)):
            i, j = maxs[a], maxs[b]
            common = lat.masks[i] & lat.masks[j] & ~1
            if common:
                e = (common & -common).bit_length() - 1
                return DichotomyResult(INTERSECTING_PAIR, (i, j), e, (lat.label(i), lat.label(j)))
    return None


def _normal_maximal(G: PermGroup) -> DichotomyResult | None:
    lat = all_subgroups(G)
    normal = [i for i in lat.maximal if lat.is_normal(i)]
    if not normal:
        return None
    i = min(normal, key=lambda i: (-lat.order(i), lat.label(i), lat.masks[i]))
    return DichotomyResult(NORMAL_MAXIMAL, (i,), None, (lat.label(i),))


def maximal_dichotomy(G: PermGroup, prefer: str = "pair") -> DichotomyResult:
    """Either two maximal subgroups meeting nontrivially, or a normal maximal one.

    ``prefer="pair"`` (default) looks for an intersecting pair first, which
    is the order the induction uses; ``prefer="normal"`` reverses it.  A
    normal maximal subgroup is chosen largest first, then by label.
    """
    if G.order == 1:
        raise InvalidParameters("the trivial group has no maximal subgroups")
    if prefer not in ("pair", "normal"):
        raise InvalidParameters(f"prefer must be 'pair' or 'normal', not {prefer!r}")
    order = (_intersecting_pair, _normal_maximal) if prefer == "pair" else (_normal_maximal, _intersecting_pair)
    for fn in order:
        res = fn(G)
        if res is not None:
            return res
    raise InternalContradiction(
        f"{G.display_name()}: no normal maximal subgroup and all maximal subgroups meet trivially"
    )


@dataclass(frozen=True)
class CountingReport:
    applicable: bool
    reason: str
    lhs: Fraction | None = None
    rhs: Fraction | None = None
    class_orders: tuple[int, ...] = ()
    contradiction: bool | None = None

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "reason": self.reason,
            "lhs": None if self.lhs is None else str(self.lhs),
            "rhs": None if self.rhs is None else str(self.rhs),
            "class_orders": list(self.class_orders),
            "contradiction": self.contradiction,
        }


def dichotomy_counting_check(G: PermGroup, force: bool = False) -> CountingReport:
    """Element count behind the dichotomy, as a test harness.

    Suppose no maximal subgroup is normal (so each is self-normalising) and
    distinct maximals meet trivially.  Every element lies in a maximal
    subgroup, so counting non-identity elements gives
    1 - 1/|G| = sum over classes of (1 - 1/m_i).  Each term is at least 1/2,
    so with two or more classes the right side is >= 1 > left side, and with
    one class m_1 = |G|.  Either way the supposition fails.

    The report says NotApplicable when the supposition is visibly false;
    ``force=True`` evaluates both sides anyway.
    """
    if G.order == 1:
        return CountingReport(False, "trivial group")
    lat = all_subgroups(G)
    reasons = []
    if any(lat.is_normal(i) for i in lat.maximal):
        reasons.append("a maximal subgroup is normal")
    if _intersecting_pair(G) is not None:
        reasons.append("two maximal subgroups intersect nontrivially")
    applicable = not reasons
    if not applicable and not force:
        return CountingReport(False, "; ".join(reasons))
    classes = {}
    for i in lat.maximal:
        classes.setdefault(lat.class_of[i], lat.order(i))
    class_orders = tuple(sorted(classes.values()))
    lhs = 1 - Fraction(1, G.order)
    rhs = sum((1 - Fraction(1, m) for m in class_orders), Fraction(0))
    return CountingReport(
        applicable,
        "; ".join(reasons) if reasons else "hypothesis holds",
        lhs,
        rhs,
        class_orders,
        lhs != rhs,
    )


# ---------------------------------------------------------------------------
# cyclic-by-prime extensions


@dataclass(frozen=True)
class ExtensionShape:
    """G = <a, b> with <a> = C_k normal, G/<a> = C_q, b a b^-1 = a^r, b^q = a^s."""

    k: int
    q: int
    r: int
    s: int
    a: int = field(default=-1, compare=False)
    b: int = field(default=-1, compare=False)

    def to_dict(self) -> dict:
        return {"k": self.k, "q": self.q, "r": self.r, "s": self.s}


def _discrete_log(G: PermGroup, a: int, target: int) -> int:
    x, e = 0, 0
    while True:
        if x == target:
            return e
        x = int(G.mul[x, a])
        e += 1
        if x == 0:
            raise InternalContradiction("element not in the cyclic subgroup")


def metacyclic_shape(G: PermGroup) -> ExtensionShape | None:
    """A normal cyclic maximal subgroup of prime index, with its twisting data.

    The largest such C_k is used.  ``a`` generates it; ``b`` is the element
    outside C_k of smallest order (then index), which makes ``s = 0``
    whenever a complement exists.
    """
    if G.order == 1:
        return None
    lat = all_subgroups(G)
    cands = []
    for i in lat.maximal:
        k = lat.order(i)
        idx = G.order // k
        mem = lat.members(i)
        if isprime(idx) and (G.element_orders[mem] == k).any() and lat.is_normal(i):
            cands.append(i)
    if not cands:
        return None
    i = min(cands, key=lambda i: (-lat.order(i), lat.label(i), lat.masks[i]))
    k = lat.order(i)
    q = G.order // k
    mem = lat.members(i)
    a = int(mem[np.nonzero(G.element_orders[mem] == k)[0][0]])
    inside = lat.masks[i]
    outside = [x for x in range(G.order) if not inside >> x & 1]
    b = min(outside, key=lambda x: (int(G.element_orders[x]), x))
    if k == 1:
        return ExtensionShape(1, q, 0, 0, a, b)
    r = _discrete_log(G, a, G.conj(b, a))
    s = _discrete_log(G, a, G.power(b, q))
    return ExtensionShape(k, q, r, s, a, b)
