"""Brute-force group cohomology, independent of every closed form.

Two methods, both exact over Z:

``resolution`` (default)
    Builds a free ZG-resolution R_n = ZG^{s_n} by repeatedly taking the
    kernel of the last boundary map as a Z-lattice and picking ZG-module
    generators for it.  Cochains are then Hom_G(R_n, M) = M^{s_n}.

``bar``
    The normalized bar resolution: cochains are functions on
    (G \\ {1})^n, so the rank is m(|G|-1)^n.  Only feasible for very small
    groups and degrees; kept as a second, textbook-literal oracle.

H^n is read off from the coboundaries: its free rank is
rank C^n - rank d^n - rank d^(n-1) and its torsion is the set of nontrivial
elementary divisors of d^(n-1) (the kernel of d^n is saturated, so all the
torsion of C^n / im d^(n-1) lives in H^n).
"""

from __future__ import annotations

import itertools
import threading

import numpy as np

from ..abelian import FiniteAbelianGroup
from ..errors import InvalidCoefficients, ResourceBound
from ..group.permgroup import PermGroup
from ..smith import Echelon, kernel_of_columns, smith_invariants
from .modules import CoefficientModule, module_action
from .tables import CohomologyTable

DEFAULT_BAR_BOUND = 4_000
DEFAULT_RESOLUTION_MAX_ORDER = 128
DEFAULT_RESOLUTION_MAX_DEGREE = 12

_resolution_lock = threading.Lock()


class FreeResolution:
    """A free ZG-resolution of Z, extended on demand.

    ``boundaries[n]`` lists, for each free generator e_i of R_n (n >= 1), its
    image in R_{n-1} as a sparse map ``(j, g) -> coefficient``, meaning
    sum c * g.e_j.  R_0 = ZG with the augmentation map.
    """

    def __init__(self, G: PermGroup):
        self.G = G
        self.ranks = [1]
        self.boundaries: list[list[dict[tuple[int, int], int]]] = [[]]

    def _translate(self, v: dict[int, int], h: int, N: int) -> dict[int, int]:
        """h acting on a vector of R_k given in flat coordinates j*N + g."""
        mul = self.G.mul
        return {(c // N) * N + int(mul[h, c % N]): x for c, x in v.items()}

    def _columns(self, n: int) -> list[dict[int, int]]:
        """Z-matrix of d_n: R_n -> R_{n-1}, one column per basis element h.e_i."""
        N = self.G.order
        if n == 0:
            return [{0: 1} for _ in range(N)]  # augmentation: every g -> 1
        cols = []
        for gen in self.boundaries[n]:
            flat = {j * N + g: c for (j, g), c in gen.items()}
            for h in range(N):
                cols.append(self._translate(flat, h, N))
        return cols

    def extend_to(self, degree: int) -> None:
        N = self.G.order
        while len(self.ranks) <= degree:
            n = len(self.ranks) - 1
            kernel = kernel_of_columns(self._columns(n))
            kernel.sort(key=lambda v: (len(v), max(abs(x) for x in v.values()), sorted(v.items())))
            span = Echelon()
            gens = []
            for v in kernel:
                if span.contains(v):
                    continue
                gens.append(v)
                for h in range(N):
                    span.insert(self._translate(v, h, N))
            self.boundaries.append([{(c // N, c % N): x for c, x in v.items()} for v in gens])
            self.ranks.append(len(gens))


def resolution(G: PermGroup, degree: int) -> FreeResolution:
    with _resolution_lock:
        res = getattr(G, "_free_resolution", None)
        if res is None:
            res = FreeResolution(G)
            G._free_resolution = res
    res.extend_to(degree)
    return res


def _coboundary_from_resolution(res: FreeResolution, act: np.ndarray, n: int) -> list[dict[int, int]]:
    """Rows of d^n: Hom(R_{n-1}, M) -> Hom(R_n, M) as a sparse integer matrix.

    (d f)(e_i) = f(d e_i) = sum c_ijg g.f(e_j); g permutes the coset basis
    of M, so block (i, j) is sum_g c_ijg P(g).
    """
    m = act.shape[1]
    rows = []
    for gen in res.boundaries[n]:
        block_rows = [dict() for _ in range(m)]
        for (j, g), c in gen.items():
            img = act[g]
            for col in range(m):
                r = block_rows[int(img[col])]
                key = j * m + col
                v = r.get(key, 0) + c
                if v:
                    r[key] = v
                else:
                    r.pop(key, None)
        rows.extend(block_rows)
    return rows


def _assemble(ranks_c: list[int], deltas: list, degree_max: int) -> list[FiniteAbelianGroup]:
    """H^n from cochain ranks and coboundary matrices d^1 .. d^(degree_max+1)."""
    smith = [None] + [smith_invariants(d) for d in deltas]
    entries = []
    for n in range(degree_max + 1):
        rank_in = smith[n].rank if n >= 1 else 0
        rank_out = smith[n + 1].rank
        free = ranks_c[n] - rank_out - rank_in
        torsion = smith[n].torsion if n >= 1 else ()
        entries.append(FiniteAbelianGroup.from_cyclic_orders(torsion, free))
    return entries


def _oracle_resolution(G: PermGroup, act: np.ndarray, degree_max: int, max_order: int, max_degree: int):
    if G.order > max_order or degree_max > max_degree:
        raise ResourceBound(
            f"resolution oracle limited to |G| <= {max_order} and degree <= {max_degree} "
            f"(asked |G| = {G.order}, degree {degree_max})"
        )
    res = resolution(G, degree_max + 1)
    m = act.shape[1]
    ranks_c = [m * res.ranks[n] for n in range(degree_max + 2)]
    deltas = [_coboundary_from_resolution(res, act, n) for n in range(1, degree_max + 2)]
    return _assemble(ranks_c, deltas, degree_max)


def _oracle_bar(G: PermGroup, act: np.ndarray, degree_max: int, bound: int):
    N, m = G.order, act.shape[1]
    k = N - 1
    if k ** (degree_max + 1) * m > bound:
        raise ResourceBound(
            f"bar cochains of degree {degree_max + 1} need {k ** (degree_max + 1) * m} "
            f"coordinates, over the bound {bound}"
        )
    mul, inv = G.mul, G.inv
    nontriv = range(1, N)

    def col(tup, c):  # coordinate of f(tup)_c in C^len(tup)
        idx = 0
        for t in tup:
            idx = idx * k + (t - 1)
        return idx * m + c

    deltas = []
    for n in range(0, degree_max + 1):  # d^(n+1): C^n -> C^(n+1)
        rows = []
        for tup in itertools.product(nontriv, repeat=n + 1):
            g1 = tup[0]
            g1inv = int(inv[g1])
            for c in range(m):
                row: dict[int, int] = {}

                def add(key, v):
                    s = row.get(key, 0) + v
                    if s:
                        row[key] = s
                    else:
                        row.pop(key, None)

                # g1 . f(g2..g_{n+1}), component c is f(...)_{g1^-1 c}
                add(col(tup[1:], int(act[g1inv, c])), 1)
                for i in range(1, n + 1):
                    prod = int(mul[tup[i - 1], tup[i]])
                    if prod == 0:
                        continue  # normalized cochains vanish on degenerate tuples
                    add(col(tup[: i - 1] + (prod,) + tup[i + 1 :], c), -1 if i % 2 else 1)
                add(col(tup[:n], c), -1 if (n + 1) % 2 else 1)
                rows.append(row)
        deltas.append(rows)
    ranks_c = [m * k**n for n in range(degree_max + 2)]
    return _assemble(ranks_c, deltas, degree_max)


def oracle_cohomology(
    G: PermGroup,
    coeff: CoefficientModule,
    degree_max: int,
    method: str = "resolution",
    bar_bound: int = DEFAULT_BAR_BOUND,
    max_order: int = DEFAULT_RESOLUTION_MAX_ORDER,
    max_degree: int = DEFAULT_RESOLUTION_MAX_DEGREE,
) -> CohomologyTable:
    """H^0 .. H^degree_max of G with coefficients in a permutation module.

    ``method`` is ``"resolution"``, ``"bar"`` or ``"auto"`` (bar when it
    fits under ``bar_bound``, otherwise resolution).
    """
    if degree_max < 0:
        raise ResourceBound("degree_max must be >= 0")
    if not isinstance(coeff, CoefficientModule):
        raise InvalidCoefficients(f"not a coefficient module: {coeff!r}")
    act = module_action(G, coeff)
    if method == "auto":
        k, m = G.order - 1, act.shape[1]
        method = "bar" if k ** (degree_max + 1) * m <= bar_bound else "resolution"
    if method == "bar":
        entries = _oracle_bar(G, act, degree_max, bar_bound)
    elif method == "resolution":
        entries = _oracle_resolution(G, act, degree_max, max_order, max_degree)
    else:
        raise ValueError(f"unknown oracle method {method!r}")
    return CohomologyTable(tuple(entries), None, coeff.descriptor(), G.label, f"oracle:{method}")
