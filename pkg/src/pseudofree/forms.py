"""Unimodular intersection forms and the mod-p collapse test.

For a homologically trivial action of C_p x C_p on a simply connected
4-manifold, the mod-p Borel spectral sequence collapses once d_3 kills
H^2(X; F_p).  Whether the standard product arguments force that depends
only on the mod-p cup-product form on H^2:

* p not in {2, 3}: always.
* p = 3: a class u with u.u != 0 needs an independent partner v with
  u.v = 0.
* p = 2: an isotropic class u (u.u = 0) needs u^perp != <u>; with
  H^2 = 0 nothing controls d_5, so rank 0 is not guaranteed either.

The checks below decide these conditions by enumerating F_p^rank.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field

from sympy import GF, ZZ, isprime
from sympy.polys.matrices import DomainMatrix

from .errors import InvalidParameters, NotUnimodular, SearchBound

DEFAULT_SEARCH_CAP = 10**7

GUARANTEED = "Guaranteed"
NOT_GUARANTEED = "NotGuaranteed"

TAG_LARGE_PRIME = "p-not-2-or-3"
TAG_PRODUCT = "product-argument"
TAG_PARTNER = "partner-vector"


def _det(matrix: tuple[tuple[int, ...], ...]) -> int:
    n = len(matrix)
    if n == 0:
        return 1
    return int(DomainMatrix([[ZZ(x) for x in row] for row in matrix], (n, n), ZZ).det())


@dataclass(frozen=True)
class IntersectionForm:
    """A symmetric integer matrix with determinant +-1."""

    matrix: tuple[tuple[int, ...], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        n = len(m)
        if any(len(row) != n for row in m):
            raise InvalidParameters("intersection form must be a square matrix")
        if any(m[i][j] != m[j][i] for i in range(n) for j in range(i)):
            raise InvalidParameters("intersection form must be symmetric")
        if abs(_det(m)) != 1:
            raise NotUnimodular(f"determinant {_det(m)} is not +-1")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def is_even(self) -> bool:
        return all(self.matrix[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def signature(self) -> int:
        import numpy as np

        if self.rank == 0:
            return 0
        eig = np.linalg.eigvalsh(np.array(self.matrix, dtype=float))
        return int((eig > 0).sum() - (eig < 0).sum())

    def display_name(self) -> str:
        return self.name or json.dumps([list(r) for r in self.matrix])

    def __add__(self, other: IntersectionForm) -> IntersectionForm:
        n, k = self.rank, other.rank
        rows = [list(r) + [0] * k for r in self.matrix] + [[0] * n + list(r) for r in other.matrix]
        name = None
        if self.name is not None and other.name is not None:
            name = other.name if n == 0 else self.name if k == 0 else f"{self.name}+{other.name}"
        return IntersectionForm(tuple(map(tuple, rows)), name)

    def to_dict(self) -> dict:
        return {"name": self.name, "matrix": [list(r) for r in self.matrix]}

    @classmethod
    def from_dict(cls, d: dict) -> IntersectionForm:
        return cls(tuple(tuple(r) for r in d["matrix"]), d.get("name"))


def diagonal(signs) -> IntersectionForm:
    signs = tuple(int(s) for s in signs)
    if any(s not in (1, -1) for s in signs):
        raise InvalidParameters("diagonal entries must be +1 or -1")
    n = len(signs)
    m = tuple(tuple(signs[i] if i == j else 0 for j in range(n)) for i in range(n))
    return IntersectionForm(m, "diag:" + ",".join(f"{s:+d}" for s in signs))


def hyperbolic(copies: int = 1) -> IntersectionForm:
    if copies < 1:
        raise InvalidParameters("need at least one copy of H")
    form = IntersectionForm(((0, 1), (1, 0)), "H")
    for _ in range(copies - 1):
        form = form + IntersectionForm(((0, 1), (1, 0)), "H")
    return IntersectionForm(form.matrix, "H" if copies == 1 else f"H*{copies}")


def e8() -> IntersectionForm:
    """The positive definite E8 form (Cartan matrix, Bourbaki numbering)."""
    edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]
    m = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in edges:
        m[i][j] = m[j][i] = -1
    return IntersectionForm(tuple(map(tuple, m)), "E8")


def form_catalog() -> tuple[IntersectionForm, ...]:
    """Diag(+-1) forms of rank 0..6 (sorted signs), H, H*2, H*3, E8, E8+H."""
    out = []
    for n in range(7):
        for minus in range(n + 1):
            out.append(diagonal([1] * (n - minus) + [-1] * minus))
    out += [hyperbolic(1), hyperbolic(2), hyperbolic(3), e8(), e8() + hyperbolic(1)]
    return tuple(out)


_TERM = re.compile(r"\s*(?:(?P<diag>diag:\s*(?P<signs>[+-]?1(?:\s*,\s*[+-]?1)*)?)|(?P<name>H|E8)(?:\s*\*\s*(?P<k>\d+))?)\s*")


def parse_form(text: str) -> IntersectionForm:
    """Parse ``diag:+1,-1``, ``H``, ``H*2``, ``E8``, ``E8+H`` or a JSON matrix.

    >>> parse_form("E8+H").rank
    10
    >>> parse_form("[[0, 1], [1, 0]]").matrix
    ((0, 1), (1, 0))
    """
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InvalidParameters(f"bad JSON matrix: {exc}") from None
        if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
            raise InvalidParameters("JSON form must be a list of rows")
        return IntersectionForm(tuple(tuple(r) for r in data))
    if stripped in ("0", "diag:", ""):
        return diagonal(())
    form = None
    for part in re.split(r"\+(?=\s*[A-Za-z])", stripped):
        m = _TERM.fullmatch(part)
        if not m:
            raise InvalidParameters(f"cannot parse form term {part.strip()!r}")
        if m.group("diag") is not None:
            signs = [int(s) for s in (m.group("signs") or "").replace(" ", "").split(",") if s]
            term = diagonal(signs)
        else:
            k = int(m.group("k") or 1)
            if k < 1:
                raise InvalidParameters("multiplicity must be >= 1")
            if m.group("name") == "H":
                term = hyperbolic(k)
            else:
                term = e8()
                for _ in range(k - 1):
                    term = term + e8()
                if k > 1:
                    term = IntersectionForm(term.matrix, f"E8*{k}")
        form = term if form is None else form + term
    return form


# ---------------------------------------------------------------------------
# mod p


@dataclass(frozen=True)
class FormModP:
    p: int
    matrix: tuple[tuple[int, ...], ...]
    name: str | None = field(default=None, compare=False)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def dot(self, u, v) -> int:
        m = self.matrix
        return sum(u[i] * m[i][j] * v[j] for i in range(len(u)) if u[i] for j in range(len(v)) if v[j]) % self.p

    def perp_basis(self, vectors) -> list[tuple[int, ...]]:
        """Basis of the orthogonal complement of the span of ``vectors``."""
        n, p = self.rank, self.p
        if n == 0:
            return []
        rows = [[sum(v[i] * self.matrix[i][j] for i in range(n)) % p for j in range(n)] for v in vectors]
        if not rows:
            return [tuple(int(i == j) for j in range(n)) for i in range(n)]
        F = GF(p)
        dm = DomainMatrix([[F(x) for x in r] for r in rows], (len(rows), n), F)
        ns = dm.nullspace().to_Matrix()
        return [tuple(int(x) % p for x in ns.row(i)) for i in range(ns.rows)]

    def vectors(self, projective: bool = False):
        """All nonzero vectors of F_p^rank; one per line if ``projective``."""
        for w in itertools.product(range(self.p), repeat=self.rank):
            v = w[::-1]  # e_1 comes first
            if not any(v):
                continue
            if projective and next(x for x in v if x) != 1:
                continue
            yield v

    def to_dict(self) -> dict:
        return {"p": self.p, "name": self.name, "matrix": [list(r) for r in self.matrix]}


def reduce_mod_p(form: IntersectionForm, p: int) -> FormModP:
    if not isprime(p):
        raise InvalidParameters(f"{p} is not prime")
    m = tuple(tuple(x % p for x in row) for row in form.matrix)
    if form.rank and _det(m) % p == 0:
        raise NotUnimodular(f"form is degenerate mod {p}")
    return FormModP(p, m, form.name)


def _span_contains(p: int, u, vectors) -> bool:
    """Is every vector in ``vectors`` a multiple of u?"""
    multiples = {tuple(c * x % p for x in u) for c in range(p)}
    return all(tuple(x % p for x in v) in multiples for v in vectors)


@dataclass(frozen=True)
class CollapseVerdict:
    outcome: str
    tag: str | None = None  # justification for Guaranteed
    witness: tuple[int, ...] | None = None
    reason: str = ""
    p: int = 0
    rank: int = 0
    checked: int = 0

    @property
    def guaranteed(self) -> bool:
        return self.outcome == GUARANTEED

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "tag": self.tag,
            "witness": None if self.witness is None else list(self.witness),
            "reason": self.reason,
            "p": self.p,
            "rank": self.rank,
            "checked": self.checked,
        }

    @classmethod
    def from_dict(cls, d: dict) -> CollapseVerdict:
        w = d.get("witness")
        return cls(d["outcome"], d.get("tag"), None if w is None else tuple(w), d.get("reason", ""),
                   d.get("p", 0), d.get("rank", 0), d.get("checked", 0))


def _check_cap(fm: FormModP, cap: int) -> None:
    if fm.p**fm.rank > cap:
        raise SearchBound(f"{fm.p}^{fm.rank} vectors exceed the search cap {cap}")


def collapse_guaranteed(fm: FormModP, search_cap: int = DEFAULT_SEARCH_CAP) -> CollapseVerdict:
    """Decide whether the product arguments force d_3 = d_5 = 0 mod p."""
    p, n = fm.p, fm.rank
    if p not in (2, 3):
        return CollapseVerdict(GUARANTEED, TAG_LARGE_PRIME, None, "3 and 2 are units mod p", p, n)
    if n == 0:
        if p == 2:
            return CollapseVerdict(NOT_GUARANTEED, None, None, "H^2 = 0, so nothing controls d_5 at p = 2", p, n)
        return CollapseVerdict(GUARANTEED, TAG_PRODUCT, None, "H^2 = 0 and p != 2", p, n)
    _check_cap(fm, search_cap)
    checked = 0
    for u in fm.vectors(projective=True):
        checked += 1
        uu = fm.dot(u, u)
        if p == 3 and uu != 0:
            perp = fm.perp_basis([u])
            if not perp:  # u^perp = 0, and u itself is not in it
                return CollapseVerdict(NOT_GUARANTEED, None, u, "u.u != 0 and no independent v with u.v = 0", p, n, checked)
        elif p == 2 and uu == 0:
            perp = fm.perp_basis([u])
            if _span_contains(p, u, perp):
                return CollapseVerdict(NOT_GUARANTEED, None, u, "u.u = 0 and u^perp = <u>", p, n, checked)
    tag = TAG_PARTNER if n >= 2 else TAG_PRODUCT
    return CollapseVerdict(GUARANTEED, tag, None, f"every class checked over F_{p}^{n}", p, n, checked)


def verify_witness(fm: FormModP, verdict: CollapseVerdict) -> bool:
    """Re-check a NotGuaranteed witness by brute force over all of F_p^rank."""
    if verdict.outcome != NOT_GUARANTEED:
        return False
    p = fm.p
    if verdict.witness is None:
        return p == 2 and fm.rank == 0
    u = verdict.witness
    if len(u) != fm.rank or not any(u):
        return False
    orth = [v for v in fm.vectors() if fm.dot(u, v) == 0]
    if p == 3:
        return fm.dot(u, u) != 0 and _span_contains(p, u, orth)
    if p == 2:
        return fm.dot(u, u) == 0 and _span_contains(p, u, orth)
    return False


def elemabel_fixed_points(p: int, form: IntersectionForm, b2: int, search_cap: int = DEFAULT_SEARCH_CAP) -> int | None:
    """b2 + 2 isolated fixed points when collapse is guaranteed, else None.

    Borel's theorem gives dim H^*(X^G; F_p) = dim H^*(X; F_p) = b2 + 2, and
    a rank-2 elementary abelian group cannot fix a surface.
    """
    if b2 != form.rank:
        raise InvalidParameters(f"b2 = {b2} but the form has rank {form.rank}")
    verdict = collapse_guaranteed(reduce_mod_p(form, p), search_cap)
    return b2 + 2 if verdict.guaranteed else None
