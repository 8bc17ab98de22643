"""Permutations of {0, ..., n-1}.

Composition follows the functional convention: ``(p * q)(x) == p(q(x))``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from ..errors import InvalidPermutation


class Permutation:
    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(len(images))):
            raise InvalidPermutation(f"not a bijection of 0..{len(images) - 1}: {images}")
        self.images = images

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(range(n))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int | None = None) -> Permutation:
        """Build from 0-based cycles; ``n`` defaults to the largest point + 1.

        Cycles need not be disjoint: they are composed right to left, as in
        the usual product of cycles.
        """
        cycles = [tuple(int(x) for x in c) for c in cycles]
        for c in cycles:
            if len(set(c)) != len(c):
                raise InvalidPermutation(f"repeated point in cycle {c}")
            if any(x < 0 for x in c):
                raise InvalidPermutation(f"negative point in cycle {c}")
        top = max((x for c in cycles for x in c), default=-1) + 1
        n = top if n is None else n
        if n < top:
            raise InvalidPermutation(f"cycle point out of range for degree {n}")
        result = list(range(n))
        for c in reversed(cycles):
            step = list(range(n))
            for a, b in zip(c, c[1:] + c[:1]):
                step[a] = b
            result = [step[x] for x in result]
        return cls(result)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Permutation) -> Permutation:
        if self.degree != other.degree:
            raise InvalidPermutation("degree mismatch in composition")
        return Permutation(self.images[x] for x in other.images)

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for i, x in enumerate(self.images):
            inv[x] = i
        return Permutation(inv)

    def extend(self, n: int) -> Permutation:
        """The same permutation on a larger domain, fixing the new points."""
        if n < self.degree:
            raise InvalidPermutation("cannot shrink a permutation")
        return Permutation(self.images + tuple(range(self.degree, n)))

    def shift(self, offset: int, n: int) -> Permutation:
        """Act on points offset..offset+degree-1 of a domain of size n."""
        out = list(range(n))
        for i, x in enumerate(self.images):
            out[i + offset] = x + offset
        return Permutation(out)

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cyc, x = [], start
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def cycle_string(self, one_based: bool = True) -> str:
        off = 1 if one_based else 0
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(str(x + off) for x in c) + ")" for c in cyc)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other: Permutation):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({list(self.images)})"

    def __str__(self):
        return self.cycle_string()
