"""Finite permutation groups with a dense multiplication table.

Elements are stored in lexicographic order of their image tuples, so the
identity always has index 0 and the ordering is canonical for a given set of
permutations.  Subgroups are handled as Python-int bitmasks over the
parent's element indices.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from functools import cached_property

import numpy as np

from ..errors import InvalidPermutation, OrderCapExceeded
from .permutation import Permutation

DEFAULT_ORDER_CAP = 2000

_HASH_WEIGHTS = np.random.default_rng(20240611).integers(1, 2**62, size=4096, dtype=np.int64)


def _row_keys(arr: np.ndarray) -> np.ndarray:
    n = arr.shape[-1]
    with np.errstate(over="ignore"):
        return (arr.astype(np.int64) * _HASH_WEIGHTS[:n]).sum(axis=-1)


def mask_from_indices(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def indices_from_mask(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        low = mask & -mask
        i = low.bit_length() - 1
        out.append(i)
        mask ^= low
    return out


class PermGroup:
    """A finite group given by permutation generators on ``degree`` points.

    Build one with :func:`group_from_generators` (or the named families);
    the constructor expects an already closed, sorted element list.
    """

    def __init__(
        self,
        degree: int,
        generators: Sequence[Permutation] | None,
        elements: Sequence[tuple[int, ...]],
        name: str | None = None,
        mul: np.ndarray | None = None,
    ):
        self.degree = degree
        self._generators = None if generators is None else tuple(generators)
        self._images = np.array(elements, dtype=np.int64).reshape(len(elements), degree)
        self.order = len(elements)
        self.name = name
        if mul is not None:
            self.mul = mul
        self._parent_lattice = None  # (parent group, parent indices) when derived
        self._lattice = None

    @property
    def generators(self) -> tuple[Permutation, ...]:
        if self._generators is None:
            gens = self.small_generating_set(self.full_mask)
            self._generators = tuple(self.elements[i] for i in gens)
        return self._generators

    # -- element access -------------------------------------------------
    @cached_property
    def elements(self) -> tuple[Permutation, ...]:
        return tuple(Permutation(r) for r in self._images.tolist())

    @cached_property
    def _key_index(self) -> tuple[np.ndarray, np.ndarray]:
        keys = _row_keys(self._images)
        order = np.argsort(keys)
        sk = keys[order]
        if len(sk) > 1 and np.any(sk[1:] == sk[:-1]):  # pragma: no cover - 2^-60 event
            raise RuntimeError("hash collision in element table")
        return sk, order

    def _lookup(self, rows: np.ndarray) -> np.ndarray:
        sk, order = self._key_index
        keys = _row_keys(rows)
        pos = np.searchsorted(sk, keys)
        pos = np.minimum(pos, len(sk) - 1)
        if not np.all(sk[pos] == keys):
            raise KeyError("permutation not in group")
        return order[pos]

    def index(self, perm: Permutation | Sequence[int]) -> int:
        images = perm.images if isinstance(perm, Permutation) else tuple(perm)
        if len(images) != self.degree:
            raise KeyError("degree mismatch")
        return int(self._lookup(np.array([images]))[0])

    def __contains__(self, perm) -> bool:
        try:
            self.index(perm)
        except KeyError:
            return False
        return True

    @cached_property
    def mul(self) -> np.ndarray:
        """``mul[a, b]`` is the index of ``elements[a] * elements[b]``."""
        N, E = self.order, self._images
        dtype = np.int16 if N < 2**15 else np.int32
        out = np.empty((N, N), dtype=dtype)
        block = max(1, 2**20 // max(1, N * self.degree))
        for start in range(0, N, block):
            stop = min(N, start + block)
            prod = E[start:stop][:, E]  # [a, b, x] = E[a, E[b, x]]
            out[start:stop] = self._lookup(prod.reshape(-1, self.degree)).reshape(stop - start, N)
        return out

    @cached_property
    def inv(self) -> np.ndarray:
        rows, cols = np.nonzero(self.mul == 0)
        out = np.empty(self.order, dtype=np.int64)
        out[rows] = cols
        return out

    @cached_property
    def element_orders(self) -> np.ndarray:
        N = self.order
        orders = np.zeros(N, dtype=np.int64)
        cur = np.arange(N)
        k = 1
        remaining = np.ones(N, dtype=bool)
        while remaining.any():
            done = remaining & (cur == 0)
            orders[done] = k
            remaining &= ~done
            cur = self.mul[cur, np.arange(N)]
            k += 1
        return orders

    def power(self, a: int, k: int) -> int:
        r = 0
        k %= int(self.element_orders[a])
        base = a
        while k:
            if k & 1:
                r = int(self.mul[r, base])
            base = int(self.mul[base, base])
            k >>= 1
        return r

    def conj(self, x: int, a: int) -> int:
        """x a x^-1."""
        return int(self.mul[self.mul[x, a], self.inv[x]])

    @cached_property
    def generator_indices(self) -> tuple[int, ...]:
        return tuple(self.index(g) for g in self.generators)

    @property
    def full_mask(self) -> int:
        return (1 << self.order) - 1

    # -- closures ---------------------------------------------------------
    def extend_closure(self, mask: int, members: np.ndarray, gens: Sequence[int], g: int):
        """Dimino step: the subgroup generated by ``gens`` (which includes
        ``g``), given that the others already generate ``mask``/``members``.

        The new group is a union of right cosets H*r of the old group H.  If
        r*s lands in a known coset H*r' then all of H*r*s does, so testing
        one product per (representative, generator) pair suffices.
        """
        mul = self.mul
        if mask >> g & 1:
            return mask, members
        reps, parts, new = [0], [members], mask
        i = 0
        while i < len(reps):
            r = reps[i]
            for s in gens:
                e = int(mul[r, s])
                if not new >> e & 1:
                    coset = mul[members, e]
                    new |= mask_from_indices(coset.tolist())
                    parts.append(coset)
                    reps.append(e)
            i += 1
        return new, np.sort(np.concatenate(parts)).astype(np.int64)

    def closure_mask(self, gens: Iterable[int]) -> int:
        """Mask of the subgroup generated by the given element indices."""
        mask, members, used = 1, np.zeros(1, dtype=np.int64), []
        for g in gens:
            g = int(g)
            if mask >> g & 1:
                continue
            used.append(g)
            mask, members = self.extend_closure(mask, members, used, g)
        return mask

    def subgroup_indices(self, mask: int) -> np.ndarray:
        return np.array(indices_from_mask(mask), dtype=np.int64)

    def small_generating_set(self, mask: int, attempts: int = 400) -> list[int]:
        """A short generating list for a subgroup.

        Tries for two generators first (an element of maximal order plus a
        partner), then falls back to greedy accumulation.
        """
        idx = self.subgroup_indices(mask)
        if mask == 1:
            return []
        cand = sorted(idx.tolist(), key=lambda i: (-int(self.element_orders[i]), i))
        a = cand[0]
        if self.closure_mask([a]) == mask:
            return [a]
        tries = 0
        for a in cand[:3]:
            for b in cand:
                if b == a:
                    continue
                tries += 1
                if self.closure_mask([a, b]) == mask:
                    return [a, b]
                if tries >= attempts:
                    break
            if tries >= attempts:
                break
        gens, cur = [], 1
        for i in cand:
            if cur == mask:
                break
            if not cur >> i & 1:
                gens.append(i)
                cur = self.closure_mask(gens)
        return gens

    def subgroup(self, mask: int, name: str | None = None) -> PermGroup:
        """The subgroup with the given element mask, as a standalone PermGroup.

        Its multiplication table and, once computed, its subgroup lattice are
        inherited from this group instead of being rebuilt.
        """
        idx = self.subgroup_indices(mask)
        pos = np.full(self.order, -1, dtype=np.int64)
        pos[idx] = np.arange(len(idx))
        child_mul = pos[self.mul[np.ix_(idx, idx)]].astype(self.mul.dtype)
        child = PermGroup(
            self.degree,
            None,
            self._images[idx],
            name=name,
            mul=child_mul,
        )
        child._parent_lattice = (self, idx)
        return child

    # -- structure shortcuts -------------------------------------------------
    @cached_property
    def is_abelian(self) -> bool:
        m = self.mul
        return bool(np.array_equal(m, m.T))

    @cached_property
    def label(self) -> str:
        from .labels import canonical_label

        return canonical_label(self)

    @property
    def id(self) -> str:
        return self.label

    def lattice(self):
        from .lattice import all_subgroups

        return all_subgroups(self)

    def sort_key(self) -> tuple[int, str]:
        return (self.order, self.label)

    def display_name(self) -> str:
        return self.name or self.label

    def __repr__(self):
        return f"PermGroup({self.display_name()}, order={self.order}, degree={self.degree})"

    def __len__(self):
        return self.order


def group_from_generators(
    gens: Sequence[Permutation | Sequence[int]],
    degree: int | None = None,
    name: str | None = None,
    order_cap: int = DEFAULT_ORDER_CAP,
) -> PermGroup:
    """Close ``gens`` under composition.

    >>> group_from_generators([Permutation([1, 2, 3, 4, 5, 0])]).order
    6
    """
    gens = [g if isinstance(g, Permutation) else Permutation(g) for g in gens]
    degrees = {g.degree for g in gens}
    if degree is not None:
        degrees.add(degree)
    if len(degrees) > 1:
        raise InvalidPermutation(f"generators act on different domains: {sorted(degrees)}")
    n = degrees.pop() if degrees else 1
    ident = tuple(range(n))
    gen_images = [g.images for g in gens if not g.is_identity()]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gen_images:
                y = tuple(g[i] for i in x)  # g * x
                if y not in seen:
                    seen.add(y)
                    if len(seen) > order_cap:
                        raise OrderCapExceeded(order_cap)
                    nxt.append(y)
        frontier = nxt
    return PermGroup(n, gens, sorted(seen), name=name)


def trivial_group(degree: int = 1) -> PermGroup:
    return group_from_generators([], degree=degree, name="C(1)")
