"""Canonical labels and brute-force isomorphism testing.

Abelian groups are labelled by their invariant factors (``C2xC6``), which
determine them up to isomorphism.  Other groups get ``N<order>.<digest>``
where the digest hashes isomorphism invariants: the multiset of
(element order, centralizer order, number of square roots), the
abelianization and the orders of centre and derived subgroup.  Groups of
order at most 64 that share a digest but are not isomorphic receive a
disambiguating suffix ``#k``.  Above order 64 no isomorphism test is run.
"""

from __future__ import annotations

import hashlib
import threading
from collections import Counter
from itertools import product

import numpy as np

from .permgroup import PermGroup

ISO_TEST_MAX_ORDER = 64

_registry: dict[str, list[PermGroup]] = {}
_registry_lock = threading.Lock()


def centralizer_orders(G: PermGroup) -> np.ndarray:
    m = G.mul
    return (m == m.T).sum(axis=1)


def fingerprint(G: PermGroup) -> tuple:
    from .structure import abelianization, center_mask, commutator_mask

    orders = G.element_orders
    cent = centralizer_orders(G)
    sqrt_counts = np.bincount(np.diagonal(G.mul).astype(np.int64), minlength=G.order)
    profile = Counter(zip(orders.tolist(), cent.tolist(), sqrt_counts.tolist()))
    return (
        G.order,
        tuple(sorted(profile.items())),
        abelianization(G).invariant_factors,
        bin(center_mask(G)).count("1"),
        bin(commutator_mask(G)).count("1"),
    )


def _element_profile(G: PermGroup) -> list[tuple[int, int]]:
    cent = centralizer_orders(G)
    return list(zip(G.element_orders.tolist(), cent.tolist()))


def find_isomorphism(G: PermGroup, H: PermGroup) -> list[int] | None:
    """An isomorphism G -> H as an index map, or None.

    Generator images are tried exhaustively among elements with matching
    (order, centralizer order); each candidate is extended along the Cayley
    graph and rejected on the first inconsistency.
    """
    if G.order != H.order:
        return None
    if G.is_abelian != H.is_abelian:
        return None
    gens = list(G.generator_indices)
    gens = [g for g in gens if g != 0]
    if not gens:
        return [0] if H.order == 1 else None
    prof_g = _element_profile(G)
    prof_h = _element_profile(H)
    if sorted(prof_g) != sorted(prof_h):
        return None
    cands = [[h for h in range(H.order) if prof_h[h] == prof_g[g]] for g in gens]
    N = G.order
    gm, hm = G.mul, H.mul
    for images in product(*cands):
        phi = [-1] * N
        used = [False] * N
        phi[0] = 0
        used[0] = True
        stack = [0]
        ok = True
        while stack and ok:
            x = stack.pop()
            for g, h in zip(gens, images):
                y = int(gm[x, g])
                z = int(hm[phi[x], h])
                if phi[y] == -1:
                    if used[z]:
                        ok = False
                        break
                    phi[y] = z
                    used[z] = True
                    stack.append(y)
                elif phi[y] != z:
                    ok = False
                    break
        if ok and all(p >= 0 for p in phi):
            return phi
    return None


def is_isomorphic(G: PermGroup, H: PermGroup) -> bool:
    if G.order != H.order:
        return False
    if G.is_abelian and H.is_abelian:
        from .structure import abelianization

        return abelianization(G) == abelianization(H)
    if fingerprint(G) != fingerprint(H):
        return False
    return find_isomorphism(G, H) is not None


def canonical_label(G: PermGroup) -> str:
    from .structure import abelianization

    if G.is_abelian:
        inv = abelianization(G).invariant_factors
        return "x".join(f"C{d}" for d in inv) if inv else "C1"
    fp = fingerprint(G)
    digest = hashlib.sha256(repr(fp).encode()).hexdigest()[:8]
    base = f"N{G.order}.{digest}"
    if G.order > ISO_TEST_MAX_ORDER:
        return base
    with _registry_lock:
        reps = _registry.setdefault(base, [])
        for k, rep in enumerate(reps):
            if rep is G or find_isomorphism(G, rep) is not None:
                return base if k == 0 else f"{base}#{k}"
        reps.append(G)
        k = len(reps) - 1
    return base if k == 0 else f"{base}#{k}"
