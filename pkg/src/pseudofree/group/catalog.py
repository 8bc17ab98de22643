"""The test catalog: named families up to a given order, plus subgroups of S5.

This is *not* a list of all groups of each order.  It is every group the
named constructors produce with order <= ``max_order``, together with one
representative of each conjugacy class of subgroups of S5, deduplicated up
to isomorphism by canonical label.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from sympy import primerange

from .families import Family, Product, named_group
from .lattice import all_subgroups
from .permgroup import PermGroup


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    group: PermGroup

    @property
    def label(self) -> str:
        return self.group.label

    @property
    def order(self) -> int:
        return self.group.order


def _family_specs(max_order: int) -> list:
    """Constructor calls in naming-priority order (first name wins on dedup)."""
    specs = []
    specs += [Family("C", (n,)) for n in range(1, max_order + 1)]
    for p in primerange(2, max_order + 1):
        k = 2
        while p**k <= max_order:
            specs.append(Family("ElemAb", (p, k)))
            k += 1
    for m in range(2, max_order + 1):
        for n in range(m, max_order // m + 1):
            specs.append(Product((Family("C", (m,)), Family("C", (n,)))))
    for p in primerange(2, max_order + 1):
        for q in primerange(2, max_order // p + 1):
            if q != p and (p - 1) % q == 0:
                r = next(r for r in range(2, p) if pow(r, q, p) == 1)
                specs.append(Family("Meta", (p, q, r)))
    for spec, order in ((Family("S", (3,)), 6), (Family("A", (4,)), 12), (Family("S", (4,)), 24), (Family("A", (5,)), 60)):
        if order <= max_order:
            specs.append(spec)
    specs += [Family("D", (m,)) for m in range(2, max_order + 1, 2)]
    specs += [Family("Q", (m,)) for m in range(8, max_order + 1, 4)]
    for base, size in ((Family("S", (3,)), 6), (Family("Q", (8,)), 8), (Family("D", (8,)), 8)):
        for n in range(2, max_order // size + 1):
            specs.append(Product((Family("C", (n,)), base)))
    return specs


@lru_cache(maxsize=None)
def s5_subgroup_classes() -> tuple[CatalogEntry, ...]:
    """One subgroup from each of the 19 conjugacy classes of subgroups of S5."""
    S5 = named_group(Family("S", (5,)))
    lat = all_subgroups(S5)
    out = []
    for cls in lat.conjugacy_classes:
        i = min(cls, key=lambda j: lat.masks[j])
        H = lat.subgroup_group(i)
        gens = " ".join(str(g) for g in H.generators) or "()"
        H.name = f"S5 subgroup <{gens}>"
        out.append(CatalogEntry(H.name, H))
    out.sort(key=lambda e: (e.order, e.label, e.name))
    return tuple(out)


@lru_cache(maxsize=None)
def family_catalog(max_order: int = 64) -> tuple[CatalogEntry, ...]:
    return tuple(CatalogEntry(str(s), named_group(s)) for s in _family_specs(max_order))


@lru_cache(maxsize=None)
def full_catalog(max_order: int = 64, include_s5: bool = True) -> tuple[CatalogEntry, ...]:
    """Families up to ``max_order`` plus S5's subgroups, one entry per label.

    The first name seen for an isomorphism type is kept; entries are sorted
    by (order, label).
    """
    seen: dict[str, CatalogEntry] = {}
    entries = list(family_catalog(max_order))
    if include_s5:
        entries += [e for e in s5_subgroup_classes() if e.order <= max(max_order, 120)]
    for e in entries:
        seen.setdefault(e.label, e)
    return tuple(sorted(seen.values(), key=lambda e: (e.order, e.label)))
