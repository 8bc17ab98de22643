"""Exact integer normal forms for sparse matrices.

Rows are ``dict[col, value]`` with Python ints, so nothing ever overflows.
The main entry point :func:`smith_invariants` returns the rank and the
nontrivial diagonal entries of a Smith-equivalent diagonal form.  It first
eliminates every pivot that is a unit (+-1) in one sparse sweep; such a
Schur complement step leaves the remaining elementary divisors untouched.
Only the small leftover block goes through the dense gcd-based reduction.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

SparseRow = dict


@dataclass(frozen=True)
class SmithResult:
    rank: int
    torsion: tuple[int, ...]  # diagonal entries > 1, unsorted


def _to_sparse(rows: Iterable) -> list[SparseRow]:
    out = []
    for r in rows:
        if isinstance(r, dict):
            d = {c: v for c, v in r.items() if v}
        else:
            d = {c: v for c, v in enumerate(r) if v}
        if d:
            out.append(d)
    return out


class _UnitEliminator:
    """Incremental elimination over Z that only ever pivots on +-1.

    Pivot rows are frozen when created.  A pivot row is zero in the column of
    every pivot created before it, so reducing in creation order touches each
    pivot column at most once.
    """

    def __init__(self):
        self.pivots: dict[int, tuple[int, SparseRow]] = {}

    def reduce(self, acc: SparseRow) -> SparseRow:
        pivots = self.pivots
        heap = [(pivots[c][0], c) for c in acc if c in pivots]
        heapq.heapify(heap)
        while heap:
            _, c = heapq.heappop(heap)
            v = acc.pop(c, 0)
            if not v:
                continue
            for cc, w in pivots[c][1].items():
                if cc == c:
                    continue
                nv = acc.get(cc, 0) - v * w
                if nv:
                    if cc not in acc and cc in pivots:
                        heapq.heappush(heap, (pivots[cc][0], cc))
                    acc[cc] = nv
                else:
                    acc.pop(cc, None)
        return acc

    def try_pivot(self, acc: SparseRow) -> bool:
        unit = min((c for c, v in acc.items() if v in (1, -1)), default=None)
        if unit is None:
            return False
        if acc[unit] == -1:
            acc = {c: -v for c, v in acc.items()}
        self.pivots[unit] = (len(self.pivots), acc)
        return True


def _gcdext(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


class Echelon:
    """Row echelon basis of a sublattice of Z^n, built by gcd insertion.

    Every insertion applies a unimodular 2x2 transform, so the rows span
    exactly the lattice generated by everything inserted so far.  Optional
    ``tags`` ride along with each row under the same transforms; this is how
    :func:`kernel_basis` tracks the transformation matrix.
    """

    def __init__(self):
        self.rows: dict[int, SparseRow] = {}
        self.tags: dict[int, SparseRow] = {}

    def __len__(self):
        return len(self.rows)

    @staticmethod
    def _combine(a: SparseRow, x: int, b: SparseRow, y: int) -> SparseRow:
        out = {}
        if x:
            for c, v in a.items():
                out[c] = x * v
        if y:
            for c, v in b.items():
                nv = out.get(c, 0) + y * v
                if nv:
                    out[c] = nv
                else:
                    out.pop(c, None)
        return {c: v for c, v in out.items() if v}

    def insert(self, row: SparseRow, tag: SparseRow | None = None) -> SparseRow | None:
        """Insert ``row``; return its tag if the row reduced to zero."""
        row = {c: v for c, v in row.items() if v}
        tag = dict(tag) if tag is not None else None
        while row:
            lead = min(row)
            a = row[lead]
            if lead not in self.rows:
                if a < 0:
                    row = {c: -v for c, v in row.items()}
                    if tag is not None:
                        tag = {c: -v for c, v in tag.items()}
                self.rows[lead] = row
                if tag is not None:
                    self.tags[lead] = tag
                return None
            prow = self.rows[lead]
            b = prow[lead]
            if a % b == 0:
                q = a // b
                row = self._combine(row, 1, prow, -q)
                if tag is not None:
                    tag = self._combine(tag, 1, self.tags[lead], -q)
                continue
            g, s, t = _gcdext(b, a)
            # new pivot = s*prow + t*row ; remainder = (b/g)*row - (a/g)*prow
            newp = self._combine(prow, s, row, t)
            rem = self._combine(row, b // g, prow, -(a // g))
            self.rows[lead] = newp
            if tag is not None:
                ptag = self.tags[lead]
                self.tags[lead] = self._combine(ptag, s, tag, t)
                tag = self._combine(tag, b // g, ptag, -(a // g))
            row = rem
        return tag

    def contains(self, row: SparseRow) -> bool:
        row = {c: v for c, v in row.items() if v}
        while row:
            lead = min(row)
            prow = self.rows.get(lead)
            if prow is None or row[lead] % prow[lead]:
                return False
            row = self._combine(row, 1, prow, -(row[lead] // prow[lead]))
        return True


def _smith_dense(rows: list[list[int]]) -> list[int]:
    """Diagonalise a small dense integer matrix; returns |diagonal| (nonzero)."""
    A = [r[:] for r in rows if any(r)]
    if not A:
        return []
    m, n = len(A), len(A[0])
    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                v = Ai[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        A[t], A[i] = A[i], A[t]
        if j != t:
            for r in A:
                r[t], r[j] = r[j], r[t]
        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // p
                    if q:
                        Ai, At = A[i], A[t]
                        for j in range(t, n):
                            Ai[j] -= q * At[j]
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // p
                    if q:
                        for r in A:
                            r[j] -= q * r[t]
                    if A[t][j]:
                        clean = False
            if clean:
                break
            # bring the smallest leftover remainder of row/column t into the pivot
            best = (abs(p), t, t)
            for i in range(t + 1, m):
                if A[i][t] and abs(A[i][t]) < best[0]:
                    best = (abs(A[i][t]), i, t)
            for j in range(t + 1, n):
                if A[t][j] and abs(A[t][j]) < best[0]:
                    best = (abs(A[t][j]), t, j)
            _, i, j = best
            if i != t:
                A[t], A[i] = A[i], A[t]
            if j != t:
                for r in A:
                    r[t], r[j] = r[j], r[t]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def smith_invariants(rows: Iterable, ncols: int | None = None) -> SmithResult:
    """Rank and nontrivial diagonal entries of the Smith form of a matrix.

    ``rows`` may be dense lists or sparse ``{col: value}`` dicts.  The
    cokernel of the matrix (as a map from the row space's dual) has torsion
    ``Z/d`` for each returned ``d``.
    """
    rows = _to_sparse(rows)
    elim = _UnitEliminator()
    residual = []
    for r in rows:
        acc = elim.reduce(dict(r))
        if acc and not elim.try_pivot(acc):
            residual.append(acc)
    changed = True
    while changed and residual:
        changed = False
        nxt = []
        for acc in residual:
            acc = elim.reduce(acc)
            if not acc:
                continue
            if elim.try_pivot(acc):
                changed = True
            else:
                nxt.append(acc)
        residual = nxt
    units = len(elim.pivots)
    if not residual:
        return SmithResult(units, ())
    ech = Echelon()
    for acc in residual:
        ech.insert(acc)
    cols = sorted({c for r in ech.rows.values() for c in r})
    pos = {c: k for k, c in enumerate(cols)}
    dense = []
    for r in ech.rows.values():
        line = [0] * len(cols)
        for c, v in r.items():
            line[pos[c]] = v
        dense.append(line)
    diag = _smith_dense(dense)
    return SmithResult(units + len(diag), tuple(d for d in diag if d > 1))


def rank(rows: Iterable) -> int:
    return smith_invariants(rows).rank


def kernel_of_columns(columns: Sequence[SparseRow]) -> list[SparseRow]:
    """Z-basis of {x : sum_j x_j columns[j] = 0}.

    Columns are inserted into an echelon form while a tag records which
    combination of original columns each row is.  The transformation is
    unimodular, so the tags of rows that reduce to zero form a basis of the
    (saturated) kernel.
    """
    ech = Echelon()
    basis = []
    for j, col in enumerate(columns):
        tag = ech.insert(col, {j: 1})
        if tag is not None:
            basis.append(tag)
    return basis


def kernel_basis(rows: Sequence, ncols: int) -> list[SparseRow]:
    """Z-basis of {x in Z^ncols : A x = 0} for the matrix with these rows."""
    columns: list[SparseRow] = [{} for _ in range(ncols)]
    for i, r in enumerate(_to_sparse(rows)):
        for j, v in r.items():
            columns[j][i] = v
    return kernel_of_columns(columns)


def apply(rows: Sequence[SparseRow], x: SparseRow) -> SparseRow:
    """Matrix-vector product for sparse rows."""
    out = {}
    for i, r in enumerate(rows):
        s = sum(v * x.get(c, 0) for c, v in r.items())
        if s:
            out[i] = s
    return out
