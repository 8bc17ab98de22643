"""Complete subgroup lattices.

Every subgroup is a join of cyclic subgroups, so the lattice is the closure
of the set of cyclic subgroups under ``H -> <H, g>``.  For a given H only one
g per right coset Hg needs trying, since <H, g> = <H, hg>.  The same joins
tell us which subgroups are maximal: H is maximal exactly when every
<H, g> with g outside H is the whole group.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import OrderCapExceeded
from .permgroup import DEFAULT_ORDER_CAP, PermGroup, indices_from_mask, mask_from_indices


@dataclass
class SubgroupLattice:
    """All subgroups of ``group``, indexed in (order, mask) order.

    Subgroup ``i`` is the set of parent element indices whose bits are set
    in ``masks[i]``; ``gens[i]`` generates it.  Index 0 is the trivial
    subgroup and the last index is the whole group.
    """

    group: PermGroup
    masks: list[int]
    gens: list[list[int]]
    maximal: list[int]
    _children: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.index_of = {m: i for i, m in enumerate(self.masks)}
        self.orders = [bin(m).count("1") for m in self.masks]

    def __len__(self):
        return len(self.masks)

    def __iter__(self) -> Iterator[int]:
        return iter(range(len(self.masks)))

    @property
    def top(self) -> int:
        return len(self.masks) - 1

    def order(self, i: int) -> int:
        return self.orders[i]

    def members(self, i: int) -> np.ndarray:
        return np.array(indices_from_mask(self.masks[i]), dtype=np.int64)

    def contains(self, big: int, small: int) -> bool:
        return self.masks[big] & self.masks[small] == self.masks[small]

    def inclusion(self) -> list[tuple[int, int]]:
        """All pairs (i, j) with subgroup i contained in subgroup j."""
        out = []
        for i, mi in enumerate(self.masks):
            oi = self.orders[i]
            for j, mj in enumerate(self.masks):
                if self.orders[j] % oi == 0 and mi & mj == mi:
                    out.append((i, j))
        return out

    def subgroups_of(self, i: int) -> list[int]:
        m = self.masks[i]
        oi = self.orders[i]
        return [j for j, mj in enumerate(self.masks) if oi % self.orders[j] == 0 and mj & m == mj]

    def overgroups_of(self, i: int) -> list[int]:
        m = self.masks[i]
        oi = self.orders[i]
        return [j for j, mj in enumerate(self.masks) if self.orders[j] % oi == 0 and mj & m == m]

    @cached_property
    def conjugacy_classes(self) -> list[list[int]]:
        G = self.group
        n = len(self.masks)
        if G.is_abelian:
            return [[i] for i in range(n)]
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        conj_maps = []
        for x in G.generator_indices:
            conj_maps.append(G.mul[G.mul[x, :], G.inv[x]])  # a -> x a x^-1
        for i in range(n):
            mem = self.members(i)
            for cm in conj_maps:
                j = self.index_of[mask_from_indices(cm[mem].tolist())]
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        classes: dict[int, list[int]] = {}
        for i in range(n):
            classes.setdefault(find(i), []).append(i)
        return sorted(classes.values())

    @cached_property
    def class_of(self) -> list[int]:
        out = [0] * len(self.masks)
        for k, cls in enumerate(self.conjugacy_classes):
            for i in cls:
                out[i] = k
        return out

    def is_normal(self, i: int) -> bool:
        return len(self.conjugacy_classes[self.class_of[i]]) == 1

    def subgroup_group(self, i: int) -> PermGroup:
        """Subgroup ``i`` as a PermGroup (cached; shares tables with the parent)."""
        if i not in self._children:
            self._children[i] = self.group.subgroup(self.masks[i])
        return self._children[i]

    def label(self, i: int) -> str:
        return self.subgroup_group(i).label

    def sort_key(self, i: int) -> tuple[int, str, int]:
        """Deterministic (order, canonical label, mask) tie-breaking key."""
        return (self.orders[i], self.label(i), self.masks[i])

    def maximal_sorted(self) -> list[int]:
        return sorted(self.maximal, key=self.sort_key)


def _cyclic_masks(G: PermGroup) -> dict[int, int]:
    out: dict[int, int] = {}
    mul = G.mul
    for g in range(G.order):
        mask, x = 1, g
        while x != 0:
            mask |= 1 << int(x)
            x = int(mul[x, g])
        if mask not in out:
            out[mask] = g
    return out


def _enumerate(G: PermGroup) -> SubgroupLattice:
    N = G.order
    full = G.full_mask
    subs: dict[int, list[int]] = {1: []}
    for m, g in _cyclic_masks(G).items():
        if m != 1:
            subs.setdefault(m, [g])
    queue = list(subs)
    maximal = []
    mul = G.mul
    while queue:
        H = queue.pop()
        gens_h = subs[H]
        members = np.array(indices_from_mask(H), dtype=np.int64)
        covered = H
        is_max = H != full
        for g in range(N):
            if covered >> g & 1:
                continue
            covered |= mask_from_indices(mul[members, g].tolist())
            J, _ = G.extend_closure(H, members, gens_h + [g], g)
            if J != full:
                is_max = False
            if J not in subs:
                subs[J] = gens_h + [g]
                queue.append(J)
        if is_max:
            maximal.append(H)
    masks = sorted(subs, key=lambda m: (bin(m).count("1"), m))
    index = {m: i for i, m in enumerate(masks)}
    return SubgroupLattice(G, masks, [subs[m] for m in masks], sorted(index[m] for m in maximal))


def _derive(G: PermGroup, parent: PermGroup, idx: np.ndarray) -> SubgroupLattice:
    """Lattice of a subgroup, read off from the parent's lattice."""
    plat = all_subgroups(parent)
    hmask = mask_from_indices(idx.tolist())
    pos = {int(p): k for k, p in enumerate(idx.tolist())}
    subs = {}
    for m, gens in zip(plat.masks, plat.gens):
        if m & hmask == m:
            cm = 0
            for p in indices_from_mask(m):
                cm |= 1 << pos[p]
            subs[cm] = [pos[g] for g in gens]
    masks = sorted(subs, key=lambda m: (bin(m).count("1"), m))
    orders = [bin(m).count("1") for m in masks]
    full = G.full_mask
    maximal = []
    for i, m in enumerate(masks):
        if m == full:
            continue
        if not any(
            orders[j] > orders[i] and orders[j] % orders[i] == 0 and masks[j] & m == m and masks[j] != full
            for j in range(i + 1, len(masks))
        ):
            maximal.append(i)
    return SubgroupLattice(G, masks, [subs[m] for m in masks], maximal)


def all_subgroups(G: PermGroup, order_cap: int = DEFAULT_ORDER_CAP) -> SubgroupLattice:
    """The complete subgroup lattice of ``G`` (cached on the group)."""
    cached = getattr(G, "_lattice", None)
    if cached is not None:
        return cached
    if G.order > order_cap:
        raise OrderCapExceeded(order_cap)
    link = G._parent_lattice
    if link is not None and getattr(link[0], "_lattice", None) is not None:
        lat = _derive(G, link[0], link[1])
    else:
        lat = _enumerate(G)
    G._lattice = lat
    return lat
