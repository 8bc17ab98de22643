"""Finite abelian groups in invariant-factor form and factored integers.

>>> FiniteAbelianGroup.from_cyclic_orders([2, 3, 4])
FiniteAbelianGroup(invariant_factors=(2, 12), free_rank=0)
>>> str(FactoredOrder.from_int(8192))
'2^13'
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from math import prod

from sympy import factorint


class FactoredOrder(Mapping):
    """A positive integer kept as ``prime -> exponent``.

    Orders are compared exponent-wise, so products of large powers never
    have to be multiplied out.
    """

    __slots__ = ("_exps",)

    def __init__(self, exponents: Mapping[int, int] | None = None):
        exps = {}
        for p, e in (exponents or {}).items():
            p, e = int(p), int(e)
            if e < 0:
                raise ValueError(f"negative exponent {e} for prime {p}")
            if e:
                exps[p] = e
        self._exps = dict(sorted(exps.items()))

    @classmethod
    def from_int(cls, n: int) -> FactoredOrder:
        if n < 1:
            raise ValueError(f"orders are positive, got {n}")
        return cls(factorint(n))

    def __getitem__(self, p):
        return self._exps[p]

    def __iter__(self) -> Iterator[int]:
        return iter(self._exps)

    def __len__(self):
        return len(self._exps)

    def __hash__(self):
        return hash(tuple(self._exps.items()))

    def __eq__(self, other):
        if isinstance(other, FactoredOrder):
            return self._exps == other._exps
        if isinstance(other, int):
            return other > 0 and self == FactoredOrder.from_int(other)
        return NotImplemented

    def __mul__(self, other: FactoredOrder) -> FactoredOrder:
        if isinstance(other, int):
            other = FactoredOrder.from_int(other)
        out = dict(self._exps)
        for p, e in other.items():
            out[p] = out.get(p, 0) + e
        return FactoredOrder(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> FactoredOrder:
        if k < 0:
            raise ValueError("negative powers are not orders")
        return FactoredOrder({p: e * k for p, e in self._exps.items()})

    def exponent(self, p: int) -> int:
        return self._exps.get(p, 0)

    def to_int(self) -> int:
        return prod(p**e for p, e in self._exps.items())

    def to_dict(self) -> dict[str, int]:
        return {str(p): e for p, e in self._exps.items()}

    @classmethod
    def from_dict(cls, d: Mapping[str, int]) -> FactoredOrder:
        return cls({int(p): e for p, e in d.items()})

    def __str__(self):
        if not self._exps:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self._exps.items())

    def __repr__(self):
        return f"FactoredOrder({self._exps})"


def _elementary_to_invariant(prime_powers: Iterable[int]) -> tuple[int, ...]:
    by_prime: dict[int, list[int]] = {}
    for q in prime_powers:
        if q == 1:
            continue
        (p, _), = factorint(q).items()
        by_prime.setdefault(p, []).append(q)
    if not by_prime:
        return ()
    for powers in by_prime.values():
        powers.sort(reverse=True)
    length = max(len(v) for v in by_prime.values())
    factors = []
    for i in range(length):
        factors.append(prod(v[i] for v in by_prime.values() if i < len(v)))
    return tuple(reversed(factors))


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """A finitely generated abelian group Z^free_rank + Z/d_1 + ... + Z/d_t.

    ``invariant_factors`` always satisfies d_1 | d_2 | ... with every d_i >= 2;
    use :meth:`from_cyclic_orders` to normalise arbitrary direct sums.
    """

    invariant_factors: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        inv = tuple(int(d) for d in self.invariant_factors)
        if any(d < 2 for d in inv):
            raise ValueError(f"invariant factors must be >= 2: {inv}")
        if any(b % a for a, b in zip(inv, inv[1:])):
            raise ValueError(f"divisibility chain violated: {inv}")
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "invariant_factors", inv)

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[int], free_rank: int = 0) -> FiniteAbelianGroup:
        """Normalise Z/n_1 + Z/n_2 + ... (zeros count as free summands)."""
        pieces = []
        for n in orders:
            n = abs(int(n))
            if n == 0:
                free_rank += 1
            elif n > 1:
                pieces.extend(p**e for p, e in factorint(n).items())
        return cls(_elementary_to_invariant(pieces), free_rank)

    @classmethod
    def trivial(cls) -> FiniteAbelianGroup:
        return cls()

    @classmethod
    def cyclic(cls, n: int) -> FiniteAbelianGroup:
        return cls.from_cyclic_orders([n])

    @classmethod
    def free(cls, rank: int = 1) -> FiniteAbelianGroup:
        return cls((), rank)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    @property
    def order(self) -> int:
        if self.free_rank:
            raise ValueError("infinite group has no finite order")
        return prod(self.invariant_factors)

    def factored_order(self) -> FactoredOrder:
        if self.free_rank:
            raise ValueError("infinite group has no finite order")
        out = FactoredOrder()
        for d in self.invariant_factors:
            out = out * FactoredOrder.from_int(d)
        return out

    def __add__(self, other: FiniteAbelianGroup) -> FiniteAbelianGroup:
        return FiniteAbelianGroup.from_cyclic_orders(
            self.invariant_factors + other.invariant_factors, self.free_rank + other.free_rank
        )

    def __mul__(self, k: int) -> FiniteAbelianGroup:
        """Direct sum of ``k`` copies."""
        return FiniteAbelianGroup.from_cyclic_orders(self.invariant_factors * k, self.free_rank * k)

    def to_list(self) -> list:
        return ["Z"] * self.free_rank + list(self.invariant_factors)

    @classmethod
    def from_list(cls, items: Iterable) -> FiniteAbelianGroup:
        items = list(items)
        return cls.from_cyclic_orders([d for d in items if d != "Z"], sum(1 for d in items if d == "Z"))

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z{d}" for d in self.invariant_factors)
        return " + ".join(parts) if parts else "0"
