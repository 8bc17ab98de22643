"""Order bookkeeping for the collapsed Borel spectral sequence.

Nothing here computes a differential.  Collapse is an input: for n > 4 the
group H^n(X_G) has a filtration with graded pieces H^{n-4}(G),
H^{n-2}(G)^{b2} and H^n(G), and above the dimension of X it has the same
order as H^n(S_G), where S is the singular set.  Everything is compared as
factored orders, never as groups.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

from sympy import Matrix, Rational, isprime, linsolve, symbols

from .abelian import FactoredOrder
from .cohomology.modules import CoefficientModule
from .cohomology.tables import CohomologyTable, metacyclic_table, periodic_table, table_order_at
from .errors import DegreeOutOfRange, InvalidParameters, NotPeriodic

ONE = FactoredOrder()


def lefschetz_number(t0: int, t2: int, t4: int) -> int:
    """Sum of traces on H_0, H_2, H_4 (odd homology vanishes).

    >>> lefschetz_number(1, 3, 1)
    5
    """
    for t in (t0, t2, t4):
        if not isinstance(t, int) or isinstance(t, bool):
            raise InvalidParameters(f"traces must be integers, got {t!r}")
    return t0 + t2 + t4


def pseudofree_fixed_count(b2: int) -> int:
    """Fixed points of any nontrivial element: chi(X) = b2 + 2."""
    if b2 < 0:
        raise InvalidParameters("b2 must be >= 0")
    return b2 + 2


def collapsed_total_order(table: CohomologyTable, b2: int, n: int) -> FactoredOrder:
    """|H^{n-4}(G)| * |H^{n-2}(G)|^b2 * |H^n(G)| for n > 4."""
    if n <= 4:
        raise DegreeOutOfRange(f"need n > 4, got {n}")
    if n > table.degree_max:
        raise DegreeOutOfRange(f"table stops at degree {table.degree_max}, need {n}")
    if b2 < 0:
        raise InvalidParameters("b2 must be >= 0")
    return table_order_at(table, n - 4) * table_order_at(table, n - 2) ** b2 * table_order_at(table, n)


# ---------------------------------------------------------------------------
# singular sets of nonabelian pq-groups


@dataclass(frozen=True)
class SingularProfile:
    """Singular orbits by isotropy: G (x_1), C_q (x_p, size p), C_p (x_q, size q)."""

    x_1: int = 0
    x_p: int = 0
    x_q: int = 0

    def __post_init__(self):
        for name in ("x_1", "x_p", "x_q"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise InvalidParameters(f"{name} must be a nonnegative integer, got {v!r}")

    @property
    def is_empty(self) -> bool:
        return not (self.x_1 or self.x_p or self.x_q)

    def to_dict(self) -> dict:
        return {"x_1": self.x_1, "x_p": self.x_p, "x_q": self.x_q}

    @classmethod
    def from_dict(cls, d: dict) -> SingularProfile:
        return cls(d["x_1"], d["x_p"], d["x_q"])

    def as_tuple(self) -> tuple[int, int, int]:
        return self.x_1, self.x_p, self.x_q


@dataclass(frozen=True)
class OrbitStructure(SingularProfile):
    """A singular profile solved from the order equations of a pq-group."""

    p: int = 0
    q: int = 0
    m: int = 0

    def to_dict(self) -> dict:
        return {**super().to_dict(), "p": self.p, "q": self.q, "m": self.m}

    @classmethod
    def from_dict(cls, d: dict) -> OrbitStructure:
        return cls(d["x_1"], d["x_p"], d["x_q"], d["p"], d["q"], d["m"])


@dataclass(frozen=True)
class OrbitTables:
    """Cohomology of G with the coefficients of each orbit type."""

    fixed: CohomologyTable  # Z, orbits G/G
    size_p: CohomologyTable  # Z[G/C_q]
    size_q: CohomologyTable  # Z[G/C_p]

    @property
    def degree_max(self) -> int:
        return min(t.degree_max for t in (self.fixed, self.size_p, self.size_q))


def _smallest_r(p: int, q: int) -> int:
    for r in range(2, p):
        if pow(r, q, p) == 1:
            return r
    raise InvalidParameters(f"no element of order {q} mod {p}: {q} does not divide {p - 1}")


def _check_pq(p: int, q: int) -> None:
    if not (isprime(p) and isprime(q)) or p == q:
        raise InvalidParameters(f"p = {p} and q = {q} must be distinct primes")


def metacyclic_orbit_tables(p: int, q: int, degree_max: int, r: int | None = None) -> OrbitTables:
    _check_pq(p, q)
    r = _smallest_r(p, q) if r is None else r
    return OrbitTables(
        metacyclic_table(p, q, r, CoefficientModule.trivial(), degree_max),
        metacyclic_table(p, q, r, CoefficientModule.abstract_permutation(q, f"C{q}"), degree_max),
        metacyclic_table(p, q, r, CoefficientModule.abstract_permutation(p, f"C{p}"), degree_max),
    )


def singular_set_order(tables: OrbitTables, profile: SingularProfile, n: int) -> FactoredOrder:
    """|H^n(S_G)| = prod over orbit types of |H^n(G; Z[G/H])|^count."""
    if n <= 4:
        raise DegreeOutOfRange(f"need n > 4, got {n}")
    if n > tables.degree_max:
        raise DegreeOutOfRange(f"tables stop at degree {tables.degree_max}, need {n}")
    return (
        table_order_at(tables.fixed, n) ** profile.x_1
        * table_order_at(tables.size_p, n) ** profile.x_p
        * table_order_at(tables.size_q, n) ** profile.x_q
    )


def orbit_equations(p: int, q: int, m: int, r: int | None = None):
    """Exponent equations in (x_1, x_p, x_q) at degrees 4q and 4q + 2.

    One row per (degree, prime): the exponent of the prime in
    |H^n(S_G)| must equal its exponent in the collapsed |H^n(X_G)|.
    Returns a list of (degree, prime, coefficients, rhs).
    """
    _check_pq(p, q)
    if m < 0:
        raise InvalidParameters("m must be >= 0")
    tables = metacyclic_orbit_tables(p, q, 4 * q + 2, r)
    rows = []
    for n in (4 * q, 4 * q + 2):
        total = collapsed_total_order(tables.fixed, m, n)
        per = [table_order_at(t, n) for t in (tables.fixed, tables.size_p, tables.size_q)]
        for prime in (p, q):
            rows.append((n, prime, tuple(o.exponent(prime) for o in per), total.exponent(prime)))
    return rows


def textbook_orbit_equations(p: int, q: int, m: int):
    """The closed-form system x_1 + x_q = 2, x_1 + x_p = m + 2, x_q = m.

    It is what :func:`orbit_equations` produces when q = 2.  For odd q,
    H^{4q-4}(G) is Z/q rather than Z/pq, so the first equation becomes
    x_1 + x_q = 1 there; this variant keeps the q = 2 form for comparison.
    """
    _check_pq(p, q)
    if m < 0:
        raise InvalidParameters("m must be >= 0")
    return [
        (4 * q, p, (1, 0, 1), 2),
        (4 * q, q, (1, 1, 0), m + 2),
        (4 * q + 2, p, (0, 0, 1), m),
        (4 * q + 2, q, (1, 1, 0), m + 2),
    ]


def orbit_structure_solve(
    p: int, q: int, m: int, r: int | None = None, equations: str = "tables"
) -> OrbitStructure | None:
    """The nonnegative integer profile forced by the order equations, if any.

    ``equations="tables"`` derives the system from the cohomology tables;
    ``"textbook"`` uses :func:`textbook_orbit_equations`.  The two agree
    for q = 2.

    >>> orbit_structure_solve(3, 2, 2).as_tuple()
    (0, 4, 2)
    >>> orbit_structure_solve(3, 2, 3) is None
    True
    """
    if equations == "tables":
        rows = orbit_equations(p, q, m, r)
    elif equations == "textbook":
        rows = textbook_orbit_equations(p, q, m)
    else:
        raise InvalidParameters(f"equations must be 'tables' or 'textbook', not {equations!r}")
    x = symbols("x_1 x_p x_q")
    A = Matrix([list(c) for _, _, c, _ in rows])
    b = Matrix([rhs for *_, rhs in rows])
    sols = linsolve((A, b), *x)
    if not sols:
        return None
    (sol,) = sols
    if any(v.free_symbols for v in sol):  # underdetermined; never for these tables
        raise InvalidParameters("orbit equations do not determine the profile")
    vals = [Rational(v) for v in sol]
    if any(v < 0 or v.q != 1 for v in vals):
        return None
    return OrbitStructure(*(int(v) for v in vals), p=p, q=q, m=m)


# ---------------------------------------------------------------------------
# accounting reports


@dataclass(frozen=True)
class DegreeCheck:
    degree: int
    collapsed: FactoredOrder
    singular: FactoredOrder

    @property
    def match(self) -> bool:
        return self.collapsed == self.singular

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "collapsed": self.collapsed.to_dict(),
            "singular": self.singular.to_dict(),
            "match": self.match,
        }

    @classmethod
    def from_dict(cls, d: dict) -> DegreeCheck:
        return cls(d["degree"], FactoredOrder.from_dict(d["collapsed"]), FactoredOrder.from_dict(d["singular"]))


@dataclass(frozen=True)
class AccountingReport:
    b2: int
    profile: SingularProfile
    checks: tuple[DegreeCheck, ...]

    @property
    def consistent(self) -> bool:
        return all(c.match for c in self.checks)

    @property
    def mismatches(self) -> tuple[int, ...]:
        return tuple(c.degree for c in self.checks if not c.match)

    def to_dict(self) -> dict:
        return {
            "b2": self.b2,
            "profile": self.profile.to_dict(),
            "consistent": self.consistent,
            "checks": [c.to_dict() for c in self.checks],
        }

    @classmethod
    def from_dict(cls, d: dict) -> AccountingReport:
        return cls(d["b2"], SingularProfile.from_dict(d["profile"]), tuple(DegreeCheck.from_dict(c) for c in d["checks"]))


def accounting_consistency(tables: OrbitTables, profile: SingularProfile, b2: int, degrees) -> AccountingReport:
    """Compare |H^n(X_G)| with |H^n(S_G)| in each requested degree n > 4."""
    checks = []
    for n in sorted(set(degrees)):
        checks.append(DegreeCheck(n, collapsed_total_order(tables.fixed, b2, n), singular_set_order(tables, profile, n)))
    return AccountingReport(b2, profile, tuple(checks))


def consistent_profiles(p: int, q: int, m: int, bound: int = 20) -> list[SingularProfile]:
    """Every profile with entries <= bound passing both degrees 4q and 4q+2."""
    tables = metacyclic_orbit_tables(p, q, 4 * q + 2)
    out = []
    for x1, xp, xq in itertools.product(range(bound + 1), repeat=3):
        prof = SingularProfile(x1, xp, xq)
        if accounting_consistency(tables, prof, m, (4 * q, 4 * q + 2)).consistent:
            out.append(prof)
    return out


# ---------------------------------------------------------------------------
# semifree actions


def semifree_fixed_set_order(abelianization_order: int, num_fixed: int, n: int) -> FactoredOrder:
    """|H^n(X^G x B_G)| = |G^ab|^num_fixed for n = 2 mod 4, n > 4.

    With isolated fixed points and period-4 cohomology, each point
    contributes H^n(G) = G^ab.
    """
    if n <= 4 or n % 4 != 2:
        raise DegreeOutOfRange(f"need n > 4 with n = 2 mod 4, got {n}")
    if num_fixed < 0:
        raise InvalidParameters("num_fixed must be >= 0")
    if abelianization_order < 1:
        raise InvalidParameters("abelianization order must be positive")
    if abelianization_order == 1:
        warnings.warn("trivial abelianization: the fixed-set order is 1", stacklevel=2)
    return FactoredOrder.from_int(abelianization_order) ** num_fixed


@dataclass(frozen=True)
class CyclicityReport:
    group: str
    b2: int
    collapsed: FactoredOrder
    fixed_set: FactoredOrder
    abelianization_order: int
    order: int
    period: int | None = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        return self.collapsed == self.fixed_set

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "b2": self.b2,
            "passed": self.passed,
            "collapsed": self.collapsed.to_dict(),
            "fixed_set": self.fixed_set.to_dict(),
            "abelianization_order": self.abelianization_order,
            "order": self.order,
            "period": self.period,
        }

    @classmethod
    def from_dict(cls, d: dict) -> CyclicityReport:
        return cls(
            d["group"], d["b2"], FactoredOrder.from_dict(d["collapsed"]), FactoredOrder.from_dict(d["fixed_set"]),
            d["abelianization_order"], d["order"], d.get("period"),
        )


def semifree_cyclicity_test(G, b2: int) -> CyclicityReport:
    """Compare both sides of the degree-6 count for a semifree action.

    An isolated fixed point makes G act freely on a small 3-sphere, so the
    hypothesis itself forces the period-4 pattern; the collapsed side is
    read from that table: |G^ab|^2 * |G|^b2.  The fixed-set side is
    |G^ab|^(b2 + 2).  They agree iff G is abelian.
    """
    from .cohomology.tables import cohomological_period
    from .group.structure import abelianization, has_periodic_cohomology

    if not has_periodic_cohomology(G):
        raise NotPeriodic(f"{G.display_name()} does not have periodic cohomology")
    if b2 < 1:
        raise InvalidParameters("b2 must be >= 1")
    ab = abelianization(G)
    table = periodic_table(G.order, ab, 6, G.label)
    collapsed = collapsed_total_order(table, b2, 6)
    fixed = semifree_fixed_set_order(ab.order, pseudofree_fixed_count(b2), 6)
    return CyclicityReport(G.label, b2, collapsed, fixed, ab.order, G.order, cohomological_period(G))
