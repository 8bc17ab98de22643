"""Named group families and their permutation realisations.

A family descriptor is one of :class:`Family`, :class:`Product` or
:class:`PermList`; strings in the group-spec language are parsed first.
"""

from __future__ import annotations

from dataclasses import dataclass

from sympy import isprime

from ..errors import InvalidParameters
from .permgroup import DEFAULT_ORDER_CAP, PermGroup, group_from_generators
from .permutation import Permutation


@dataclass(frozen=True)
class Family:
    name: str  # one of C, D, Q, Meta, ElemAb, A, S
    params: tuple[int, ...]

    def __str__(self):
        return f"{self.name}({','.join(str(p) for p in self.params)})"


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __str__(self):
        return " x ".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class PermList:
    """Generators in 0-based cycle form."""

    generators: tuple[tuple[tuple[int, ...], ...], ...]

    def __str__(self):
        def cyc(g):
            return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in g) or "()"

        return "perm: " + ", ".join(cyc(g) for g in self.generators)


ARITY = {"C": 1, "D": 1, "Q": 1, "Meta": 3, "ElemAb": 2, "A": 1, "S": 1}


def _gens_cyclic(n: int) -> tuple[int, list[Permutation]]:
    if n < 1:
        raise InvalidParameters(f"C(n) needs n >= 1, got {n}")
    if n == 1:
        return 1, []
    return n, [Permutation(list(range(1, n)) + [0])]


def _gens_dihedral(m: int) -> tuple[int, list[Permutation]]:
    if m < 2 or m % 2:
        raise InvalidParameters(f"D(m) needs an even order m >= 2, got {m}")
    if m == 2:
        return 2, [Permutation([1, 0])]
    if m == 4:  # Klein four-group, regular action
        return 4, [Permutation([1, 0, 3, 2]), Permutation([2, 3, 0, 1])]
    n = m // 2
    rot = Permutation([(i + 1) % n for i in range(n)])
    ref = Permutation([(-i) % n for i in range(n)])
    return n, [rot, ref]


def _gens_quaternion(m: int) -> tuple[int, list[Permutation]]:
    if m < 8 or m % 4:
        raise InvalidParameters(f"Q(m) needs m = 4n with n >= 2, got {m}")
    n = m // 4
    two_n = 2 * n

    def idx(i, j):
        return (i % two_n) + two_n * j

    a_img, b_img = [0] * m, [0] * m
    for j in range(2):
        for k in range(two_n):
            a_img[idx(k, j)] = idx(k + 1, j)
            # b * a^k b^j = a^-k b^(j+1), and b^2 = a^n
            b_img[idx(k, j)] = idx(-k, 1) if j == 0 else idx(n - k, 0)
    return m, [Permutation(a_img), Permutation(b_img)]


def check_meta_params(p: int, q: int, r: int) -> None:
    if not (isprime(p) and isprime(q)):
        raise InvalidParameters(f"Meta(p,q,r) needs primes p and q, got p={p}, q={q}")
    if p == q:
        raise InvalidParameters("Meta(p,q,r) needs distinct primes")
    if pow(r, q, p) != 1 or r % p == 1:
        raise InvalidParameters(
            f"Meta({p},{q},{r}): r must have multiplicative order exactly {q} mod {p}"
            + (f" (impossible, since {q} does not divide {p - 1})" if (p - 1) % q else "")
        )


def _gens_meta(p: int, q: int, r: int) -> tuple[int, list[Permutation]]:
    check_meta_params(p, q, r)
    n = p + q
    a = list(range(n))
    b = list(range(n))
    for x in range(p):
        a[x] = (x + 1) % p
        b[x] = (r * x) % p
    for y in range(q):
        b[p + y] = p + (y + 1) % q
    return n, [Permutation(a), Permutation(b)]


def _gens_elemab(p: int, k: int) -> tuple[int, list[Permutation]]:
    if not isprime(p):
        raise InvalidParameters(f"ElemAb(p,k) needs p prime, got {p}")
    if k < 0:
        raise InvalidParameters("ElemAb rank must be >= 0")
    if k == 0:
        return 1, []
    n = p * k
    gens = []
    for i in range(k):
        img = list(range(n))
        for x in range(p):
            img[i * p + x] = i * p + (x + 1) % p
        gens.append(Permutation(img))
    return n, gens


def _gens_alternating(n: int) -> tuple[int, list[Permutation]]:
    if n < 1:
        raise InvalidParameters(f"A(n) needs n >= 1, got {n}")
    if n < 3:
        return n, []
    return n, [Permutation.from_cycles([(0, 1, k)], n) for k in range(2, n)]


def _gens_symmetric(n: int) -> tuple[int, list[Permutation]]:
    if n < 1:
        raise InvalidParameters(f"S(n) needs n >= 1, got {n}")
    if n == 1:
        return 1, []
    if n == 2:
        return 2, [Permutation([1, 0])]
    return n, [Permutation(list(range(1, n)) + [0]), Permutation.from_cycles([(0, 1)], n)]


_BUILDERS = {
    "C": _gens_cyclic,
    "D": _gens_dihedral,
    "Q": _gens_quaternion,
    "Meta": _gens_meta,
    "ElemAb": _gens_elemab,
    "A": _gens_alternating,
    "S": _gens_symmetric,
}


def _generators(spec) -> tuple[int, list[Permutation]]:
    if isinstance(spec, Family):
        if spec.name not in _BUILDERS:
            raise InvalidParameters(f"unknown family {spec.name!r}")
        if len(spec.params) != ARITY[spec.name]:
            raise InvalidParameters(f"{spec.name} takes {ARITY[spec.name]} parameter(s)")
        return _BUILDERS[spec.name](*spec.params)
    if isinstance(spec, Product):
        degree, gens = 0, []
        parts = [_generators(f) for f in spec.factors]
        total = sum(d for d, _ in parts)
        for d, gs in parts:
            gens.extend(g.shift(degree, total) for g in gs)
            degree += d
        return max(total, 1), gens
    if isinstance(spec, PermGroup):
        return spec.degree, list(spec.generators)
    if isinstance(spec, PermList):
        n = max((x for g in spec.generators for c in g for x in c), default=0) + 1
        return n, [Permutation.from_cycles(g, n) for g in spec.generators]
    raise InvalidParameters(f"not a group descriptor: {spec!r}")


def named_group(spec, order_cap: int = DEFAULT_ORDER_CAP) -> PermGroup:
    """Build a group from a descriptor or a group-spec string.

    >>> named_group("Q(8)").order
    8
    """
    if isinstance(spec, str):
        from ..cli.groupspec import parse_group_spec

        spec = parse_group_spec(spec)
    degree, gens = _generators(spec)
    return group_from_generators(gens, degree=degree, name=str(spec), order_cap=order_cap)


def cyclic(n: int) -> PermGroup:
    return named_group(Family("C", (n,)))


def dihedral(m: int) -> PermGroup:
    return named_group(Family("D", (m,)))


def quaternion(m: int) -> PermGroup:
    return named_group(Family("Q", (m,)))


def meta(p: int, q: int, r: int) -> PermGroup:
    return named_group(Family("Meta", (p, q, r)))


def elem_ab(p: int, k: int) -> PermGroup:
    return named_group(Family("ElemAb", (p, k)))


def alternating(n: int) -> PermGroup:
    return named_group(Family("A", (n,)))


def symmetric(n: int) -> PermGroup:
    return named_group(Family("S", (n,)))


def direct_product(*factors) -> PermGroup:
    """Product of spec nodes or already built groups, acting on disjoint points."""
    return named_group(Product(tuple(factors)))
