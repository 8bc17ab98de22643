"""Closed-form integral cohomology tables.

Every table here has H^0 = Z; positive-degree entries are finite.  The
formula families are: cyclic groups (period 2), groups of period 4, and the
nonabelian groups of order pq with the four coefficient modules Z, Z[G],
Z[G/C_q] and Z[G/C_p].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import lcm

from sympy import factorint, isprime

from ..abelian import FactoredOrder, FiniteAbelianGroup
from ..errors import DegreeOutOfRange, InfiniteEntry, InvalidCoefficients, InvalidParameters, NotPeriodic
from ..group.families import check_meta_params
from .modules import GROUP_RING, PERMUTATION, TRIVIAL, CoefficientModule

Z = FiniteAbelianGroup.free(1)
ZERO = FiniteAbelianGroup.trivial()


@dataclass(frozen=True)
class CohomologyTable:
    entries: tuple[FiniteAbelianGroup, ...]  # index = degree
    period: int | None = None
    coefficients: str = "Z"
    group: str | None = None
    source: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.period is not None and (self.period <= 0 or self.period % 2):
            raise ValueError(f"period must be a positive even integer, got {self.period}")

    @property
    def degree_max(self) -> int:
        return len(self.entries) - 1

    def __getitem__(self, degree: int) -> FiniteAbelianGroup:
        if not 0 <= degree <= self.degree_max:
            raise DegreeOutOfRange(f"degree {degree} outside 0..{self.degree_max}")
        return self.entries[degree]

    def same_entries(self, other: CohomologyTable) -> bool:
        return self.entries == other.entries

    def first_difference(self, other: CohomologyTable) -> int | None:
        for d, (a, b) in enumerate(zip(self.entries, other.entries)):
            if a != b:
                return d
        if len(self.entries) != len(other.entries):
            return min(len(self.entries), len(other.entries))
        return None

    def truncate(self, degree_max: int) -> CohomologyTable:
        return CohomologyTable(self.entries[: degree_max + 1], self.period, self.coefficients, self.group, self.source)

    def periodicity_holds(self) -> bool:
        if self.period is None:
            return True
        pi = self.period
        return all(self.entries[i] == self.entries[i + pi] for i in range(1, self.degree_max - pi + 1))

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "coefficients": self.coefficients,
            "degree_max": self.degree_max,
            "period": self.period,
            "entries": [[d, e.to_list()] for d, e in enumerate(self.entries)],
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, d: dict) -> CohomologyTable:
        entries = [FiniteAbelianGroup.from_list(e) for _, e in sorted(d["entries"], key=lambda t: t[0])]
        return cls(tuple(entries), d.get("period"), d.get("coefficients", "Z"), d.get("group"), d.get("source", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> CohomologyTable:
        return cls.from_dict(json.loads(text))

    def format_row(self) -> str:
        return "[" + ", ".join(str(e) for e in self.entries) + "]"

    def __str__(self):
        lines = [f"H^*({self.group or 'G'}; {self.coefficients})" + (f"  period {self.period}" if self.period else "")]
        lines += [f"  H^{d} = {e}" for d, e in enumerate(self.entries)]
        return "\n".join(lines)


def _check_degree(degree_max: int) -> None:
    if degree_max < 0:
        raise DegreeOutOfRange("degree_max must be >= 0")


def cyclic_table(n: int, degree_max: int, group: str | None = None) -> CohomologyTable:
    """H^*(C_n; Z): Z, then Z/n in positive even degrees, 0 in odd ones.

    >>> cyclic_table(6, 6).format_row()
    '[Z, 0, Z6, 0, Z6, 0, Z6]'
    """
    if n < 1:
        raise InvalidParameters("n must be >= 1")
    _check_degree(degree_max)
    zn = FiniteAbelianGroup.cyclic(n)
    entries = [Z] + [zn if i % 2 == 0 else ZERO for i in range(1, degree_max + 1)]
    return CohomologyTable(tuple(entries), 2, "Z", group or f"C{n}", "formula:cyclic")


def periodic_table(
    order: int, abelianization: FiniteAbelianGroup, degree_max: int, group: str | None = None
) -> CohomologyTable:
    """Period-4 pattern: G^ab in degrees 4k+2, Z/|G| in degrees 4k > 0, else 0.

    The caller vouches that G has periodic cohomology of period 4.
    """
    _check_degree(degree_max)
    if not abelianization.is_finite or order % abelianization.order:
        raise InvalidParameters("abelianization must be a finite quotient of G")
    zg = FiniteAbelianGroup.cyclic(order)
    entries = [Z]
    for i in range(1, degree_max + 1):
        entries.append(abelianization if i % 4 == 2 else zg if i % 4 == 0 else ZERO)
    return CohomologyTable(tuple(entries), 4, "Z", group, "formula:period4")


def _meta_coeff_kind(p: int, q: int, coeff: CoefficientModule) -> str:
    if coeff.kind in (TRIVIAL, GROUP_RING):
        return coeff.kind
    h = coeff.subgroup_order
    if h == p * q:
        return TRIVIAL
    if h == 1:
        return GROUP_RING
    if h == q:
        return "Cq"
    if h == p:
        return "Cp"
    raise InvalidCoefficients(f"no subgroup of order {h} in a group of order {p * q}")


def metacyclic_table(
    p: int, q: int, r: int, coeff: CoefficientModule, degree_max: int, group: str | None = None
) -> CohomologyTable:
    """Cohomology of <a, b | a^p, b^q, b a b^-1 = a^r> with four coefficient modules.

    Z:        Z/q in degrees 2k with q not dividing k, Z/pq in degrees 2lq.
    Z[G]:     Z in degree 0 only.
    Z[G/C_q]: Z/q in positive even degrees.
    Z[G/C_p]: Z/p in positive even degrees.
    Odd degrees vanish throughout.
    """
    check_meta_params(p, q, r)
    _check_degree(degree_max)
    kind = _meta_coeff_kind(p, q, coeff)
    zq, zp, zpq = (FiniteAbelianGroup.cyclic(x) for x in (q, p, p * q))
    entries = [Z]
    for i in range(1, degree_max + 1):
        if i % 2:
            entries.append(ZERO)
        elif kind == TRIVIAL:
            entries.append(zpq if (i // 2) % q == 0 else zq)
        elif kind == GROUP_RING:
            entries.append(ZERO)
        elif kind == "Cq":
            entries.append(zq)
        else:
            entries.append(zp)
    period = {TRIVIAL: 2 * q, GROUP_RING: None, "Cq": 2, "Cp": 2}[kind]
    return CohomologyTable(tuple(entries), period, coeff.descriptor(), group or f"Meta({p},{q},{r})", "formula:metacyclic")


def metacyclic_via_invariants(p: int, q: int, r: int, degree_max: int) -> CohomologyTable:
    """The same trivial-coefficient table rebuilt from the extension C_p -> G -> C_q.

    Orders p and q are coprime, so H^n(G) splits into a p-part and a q-part.
    The q-part comes from the quotient: Z/q in positive even degrees.  The
    p-part is the C_q-invariants of H^2k(C_p) = Z/p, on which b acts by
    multiplication by r^k; the invariants are Z/p iff r^k = 1 mod p.
    """
    check_meta_params(p, q, r)
    _check_degree(degree_max)
    entries = [Z]
    for i in range(1, degree_max + 1):
        if i % 2:
            entries.append(ZERO)
            continue
        k = i // 2
        p_part = p if pow(r, k, p) == 1 else 1
        entries.append(FiniteAbelianGroup.from_cyclic_orders([p_part, q]))
    return CohomologyTable(tuple(entries), 2 * q, "Z", f"Meta({p},{q},{r})", "derived:invariants")


def table_order_at(table: CohomologyTable, degree: int) -> FactoredOrder:
    """Order of a finite entry, kept factored.

    >>> str(table_order_at(cyclic_table(6, 4), 4))
    '2 * 3'
    """
    if degree == 0:
        raise InfiniteEntry("H^0 is infinite")
    entry = table[degree]
    if not entry.is_finite:
        raise InfiniteEntry(f"H^{degree} has a free part")
    return entry.factored_order()


# ---------------------------------------------------------------------------
# dispatch on an actual group


def sylow_data(G, p: int):
    """(Sylow p-subgroup index in the lattice, its order)."""
    from ..group.lattice import all_subgroups

    lat = all_subgroups(G)
    pe = p ** factorint(G.order).get(p, 0)
    for i in lat:
        if lat.order(i) == pe:
            return i, pe
    raise InvalidParameters(f"no Sylow {p}-subgroup found")  # pragma: no cover


def _normalizer_centralizer_orders(G, mask: int) -> tuple[int, int]:
    import numpy as np

    from ..group.permgroup import indices_from_mask, mask_from_indices

    members = np.array(indices_from_mask(mask), dtype=np.int64)
    norm = cent = 0
    for x in range(G.order):
        conj = G.mul[G.mul[x, members], G.inv[x]]
        if mask_from_indices(conj.tolist()) == mask:
            norm += 1
            if np.array_equal(conj, members):
                cent += 1
    return norm, cent


def cohomological_period(G) -> int | None:
    """The period of H^*(G; Z), or None if G is not periodic.

    Uses Swan's description: for odd p the Sylow p-subgroup P is cyclic and
    contributes 2|N(P):C(P)|; for p = 2 a cyclic P contributes 2 and a
    generalized quaternion P contributes 4.  The period is the lcm.
    """
    from ..group.lattice import all_subgroups
    from ..group.structure import has_periodic_cohomology

    if G.order == 1:
        return 2
    if not has_periodic_cohomology(G):
        return None
    lat = all_subgroups(G)
    period = 2
    for p in factorint(G.order):
        i, pe = sylow_data(G, p)
        mem = lat.members(i)
        cyclic = bool((G.element_orders[mem] == pe).any())
        if p == 2:
            period = lcm(period, 2 if cyclic else 4)
        else:
            norm, cent = _normalizer_centralizer_orders(G, lat.masks[i])
            period = lcm(period, 2 * (norm // cent))
    return period


def _is_nonabelian_pq(G) -> tuple[int, int, int] | None:
    """(p, q, r) when G is nonabelian of order pq; p is the normal prime."""
    f = factorint(G.order)
    if len(f) != 2 or any(e != 1 for e in f.values()) or G.is_abelian:
        return None
    from ..group.structure import metacyclic_shape

    shape = metacyclic_shape(G)
    if shape is None or not isprime(shape.k):  # pragma: no cover - order pq always has one
        return None
    return shape.k, shape.q, shape.r


def trivial_formula_table(G, degree_max: int) -> CohomologyTable:
    """H^*(G; Z) from the first closed form that applies."""
    from ..group.structure import abelianization, is_cyclic

    label = G.label
    if is_cyclic(G):
        return cyclic_table(G.order, degree_max, label)
    pqr = _is_nonabelian_pq(G)
    if pqr is not None:
        p, q, r = pqr
        return metacyclic_table(p, q, r, CoefficientModule.trivial(), degree_max, label)
    period = cohomological_period(G)
    if period == 4:
        return periodic_table(G.order, abelianization(G), degree_max, label)
    if period is None:
        raise NotPeriodic(f"{G.display_name()} is not periodic; no closed-form table")
    raise NotPeriodic(f"{G.display_name()} has period {period}; only periods 2, 4 and order pq have closed forms here")


def formula_table(G, coeff: CoefficientModule, degree_max: int) -> CohomologyTable:
    """Closed-form table for H^*(G; M), using Shapiro's lemma for Z[G/H].

    H^n(G; Z[G/H]) = H^n(H; Z), so a permutation module reduces to trivial
    coefficients on H; Z[G] is the case H = 1.  Nonabelian groups of order
    pq go straight to the four-module table.
    """
    _check_degree(degree_max)
    pqr = _is_nonabelian_pq(G)
    if pqr is not None:
        p, q, r = pqr
        if coeff.kind == PERMUTATION and coeff.subgroup_order is None:
            raise InvalidCoefficients("permutation module without a subgroup")
        return metacyclic_table(p, q, r, coeff, degree_max, G.label)
    if coeff.kind == TRIVIAL:
        return trivial_formula_table(G, degree_max)
    if coeff.kind == GROUP_RING:
        entries = (Z,) + (ZERO,) * degree_max
        return CohomologyTable(entries, None, coeff.descriptor(), G.label, "formula:free")
    mask = coeff.subgroup_mask_in(G)
    H = G.subgroup(mask)
    inner = trivial_formula_table(H, degree_max)
    return CohomologyTable(inner.entries, inner.period, coeff.descriptor(), G.label, inner.source + "+shapiro")
