"""Command-line entry point.

Exit codes: 0 success, 2 usage or invalid input, 3 a resource cap was hit,
4 an internal contradiction (including a formula table disagreeing with
the oracle under ``--verify``).
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from contextlib import redirect_stderr

from .. import __version__
from ..errors import (
    InternalContradiction,
    InvalidParameters,
    NotPeriodic,
    OrderCapExceeded,
    PseudofreeError,
    ResourceBound,
    SearchBound,
)
from .config import FORMATS, RunConfig, load_config
from .groupspec import PermList, parse_group_spec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_CONTRADICTION = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pseudofree", description="Obstructions to pseudofree, homologically trivial group actions "
                "on simply connected 4-manifolds.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--format", choices=FORMATS, help="output format (default from config: text)")
    p.add_argument("--config", help="key=value config file (default: $PSEUDOFREE_CONFIG)")
    p.add_argument("--order-cap", type=int, help="largest group order to build")
    p.add_argument("--search-cap", type=int, help="largest p^rank for form searches")
    p.add_argument("--oracle-degree-cap", type=int, help="highest degree the oracle computes")
    p.add_argument("--parallelism", type=int, help="worker processes for survey")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="decide a group and print the obstruction trace")
    a.add_argument("spec", help='group spec, e.g. "Q(8)" or "perm: (1 2 3), (1 2)"')
    a.add_argument("--b2", type=int, required=True, help="second Betti number")

    c = sub.add_parser("cohomology", help="closed-form cohomology table, optionally checked by the oracle")
    c.add_argument("spec")
    c.add_argument("--coeff", default="Z", help="Z, ZG, or Z[G/H:spec] with H given by a spec")
    c.add_argument("--max-degree", type=int, default=6)
    c.add_argument("--verify", action="store_true", help="compare with the resolution oracle")

    d = sub.add_parser("dichotomy", help="normal maximal subgroup or intersecting maximal pair")
    d.add_argument("spec")
    d.add_argument("--prefer", choices=("pair", "normal"), default="pair")
    d.add_argument("--counting", action="store_true", help="also run the element-counting check")

    o = sub.add_parser("orbits", help="solve the orbit equations of a nonabelian pq-group")
    o.add_argument("--p", type=int, required=True)
    o.add_argument("--q", type=int, required=True)
    o.add_argument("--b2", type=int, required=True)
    o.add_argument("--equations", choices=("tables", "textbook"), default="tables")

    k = sub.add_parser("collapse", help="mod-p collapse test for an intersection form")
    k.add_argument("--p", type=int, required=True)
    k.add_argument("--form", required=True, help='"diag:+1,-1", "H*2", "E8", "E8+H" or a JSON matrix')
    k.add_argument("--b2", type=int, help="also report the fixed-point count (must equal the rank)")

    s = sub.add_parser("survey", help="decide every catalog group up to an order")
    s.add_argument("--max-order", type=int, default=64)
    s.add_argument("--b2", type=int, required=True)
    s.add_argument("--no-s5", action="store_true", help="leave out the subgroups of S5")

    lt = sub.add_parser("lattice", help="list all subgroups")
    lt.add_argument("spec")
    return p


# ---------------------------------------------------------------------------
# helpers


def _group(spec: str, cfg: RunConfig):
    from ..group.families import named_group

    return named_group(parse_group_spec(spec), order_cap=cfg.order_cap)


def _coefficients(G, text: str, cfg: RunConfig):
    from ..cohomology.modules import CoefficientModule
    from ..errors import InvalidCoefficients
    from ..group.families import named_group
    from ..group.lattice import all_subgroups

    t = text.replace(" ", "")
    if t == "Z":
        return CoefficientModule.trivial()
    if t in ("ZG", "Z[G]"):
        return CoefficientModule.group_ring()
    if not (t.startswith("Z[G/") and t.endswith("]")):
        raise InvalidCoefficients(f"coefficients must be Z, ZG or Z[G/H:spec], got {text!r}")
    inner = text.strip()[4:-1].strip()
    if inner.startswith("H:"):
        inner = inner[2:]
    ast = parse_group_spec(inner)
    lat = all_subgroups(G, cfg.order_cap)
    if isinstance(ast, PermList):
        from ..group.permutation import Permutation

        idx = []
        for cycles in ast.generators:
            n = max((x for c in cycles for x in c), default=0) + 1
            if n > G.degree:
                raise InvalidCoefficients(f"H moves point {n}, but G acts on {G.degree} points")
            perm = Permutation.from_cycles(cycles, G.degree)
            if perm not in G:
                raise InvalidCoefficients(f"{perm.cycle_string()} is not an element of G")
            idx.append(G.index(perm))
        return CoefficientModule.permutation(G, G.closure_mask(idx))
    target = named_group(ast, order_cap=cfg.order_cap).label
    for i in lat:
        if lat.label(i) == target:
            return CoefficientModule.permutation(G, lat.masks[i])
    raise InvalidCoefficients(f"G has no subgroup isomorphic to {inner}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


# ---------------------------------------------------------------------------
# commands; each returns (exit code, json payload, text)


def cmd_analyze(args, cfg):
    from ..engine import decide_pseudofree, explain, replay

    G = _group(args.spec, cfg)
    v = decide_pseudofree(G, args.b2)
    rep = replay(v, G)
    code = EXIT_OK if rep.ok else EXIT_CONTRADICTION
    payload = {"group": args.spec, "label": G.label, "order": G.order, "verdict": v.to_dict(), "replay": rep.to_dict()}
    return code, payload, explain(v, G)


def cmd_cohomology(args, cfg):
    from ..cohomology.oracle import oracle_cohomology
    from ..cohomology.tables import formula_table

    if args.max_degree < 0:
        raise InvalidParameters("--max-degree must be >= 0")
    G = _group(args.spec, cfg)
    coeff = _coefficients(G, args.coeff, cfg)
    formula = None
    try:
        formula = formula_table(G, coeff, args.max_degree)
    except NotPeriodic as exc:
        if not args.verify:
            raise
        note = str(exc)
    else:
        note = None
    payload = {"group": args.spec, "label": G.label, "order": G.order, "coefficients": coeff.to_dict(),
               "table": None if formula is None else formula.to_dict()}
    lines = [f"{args.spec} [{G.label}, order {G.order}] with coefficients {coeff.descriptor()}"]
    if formula is not None:
        lines.append(f"formula ({formula.source}): {formula.format_row()}")
        if formula.period:
            lines.append(f"period: {formula.period}")
    else:
        lines.append(f"no closed form: {note}")
    code = EXIT_OK
    if args.verify:
        depth = min(args.max_degree, cfg.oracle_degree_cap)
        oracle = oracle_cohomology(G, coeff, depth, max_degree=cfg.oracle_degree_cap)
        payload["oracle"] = oracle.to_dict()
        payload["verified_through"] = depth
        lines.append(f"oracle (degrees <= {depth}): {oracle.format_row()}")
        if formula is not None:
            diff = formula.truncate(depth).first_difference(oracle)
            payload["verified"] = diff is None
            lines.append("verified=true" if diff is None else f"verified=false (first difference in degree {diff})")
            if diff is not None:
                code = EXIT_CONTRADICTION
                payload["first_difference"] = diff
        else:
            payload["verified"] = None
    return code, payload, "\n".join(lines)


def cmd_dichotomy(args, cfg):
    from ..group.lattice import all_subgroups
    from ..group.structure import dichotomy_counting_check, maximal_dichotomy

    G = _group(args.spec, cfg)
    res = maximal_dichotomy(G, prefer=args.prefer)
    lat = all_subgroups(G, cfg.order_cap)
    payload = {"group": args.spec, "label": G.label, "order": G.order, "dichotomy": res.to_dict(G),
               "witness_orders": [lat.order(i) for i in res.witness]}
    text = [f"{args.spec} [{G.label}, order {G.order}]: {res.kind}"]
    for i in res.witness:
        text.append(f"  maximal subgroup #{i}: {lat.label(i)} (order {lat.order(i)}, "
                    f"{'normal' if lat.is_normal(i) else 'not normal'})")
    if res.element is not None:
        text.append(f"  shared element: {G.elements[res.element].cycle_string()}")
    if args.counting:
        rep = dichotomy_counting_check(G, force=True)
        payload["counting"] = rep.to_dict()
        text.append(f"  counting: lhs {rep.lhs}, rhs {rep.rhs} over class orders {list(rep.class_orders)}"
                    f" ({'hypothesis holds' if rep.applicable else 'hypothesis fails: ' + rep.reason})")
    return EXIT_OK, payload, "\n".join(text)


def cmd_orbits(args, cfg):
    from ..borel import accounting_consistency, metacyclic_orbit_tables, orbit_structure_solve

    sol = orbit_structure_solve(args.p, args.q, args.b2, equations=args.equations)
    payload = {"p": args.p, "q": args.q, "b2": args.b2, "equations": args.equations,
               "solution": None if sol is None else sol.to_dict()}
    if sol is None:
        text = f"p={args.p}, q={args.q}, b2={args.b2}: no nonnegative orbit structure (infeasible)"
    else:
        q = args.q
        rep = accounting_consistency(metacyclic_orbit_tables(args.p, q, 4 * q + 2), sol, args.b2, (4 * q, 4 * q + 2))
        payload["accounting"] = rep.to_dict()
        text = (f"p={args.p}, q={args.q}, b2={args.b2}: (x_1, x_p, x_q) = {sol.as_tuple()}\n"
                + "\n".join(f"  degree {c.degree}: {c.collapsed} vs {c.singular} "
                            f"({'match' if c.match else 'mismatch'})" for c in rep.checks))
    return EXIT_OK, payload, text


def cmd_collapse(args, cfg):
    from ..forms import collapse_guaranteed, elemabel_fixed_points, parse_form, reduce_mod_p, verify_witness

    form = parse_form(args.form)
    fm = reduce_mod_p(form, args.p)
    v = collapse_guaranteed(fm, cfg.search_cap)
    payload = {"form": form.to_dict(), "p": args.p, "verdict": v.to_dict()}
    text = [f"{form.display_name()} (rank {form.rank}) mod {args.p}: {v.outcome}"]
    if v.guaranteed:
        text.append(f"  justification: {v.tag}; {v.reason}")
    else:
        ok = verify_witness(fm, v)
        payload["witness_verified"] = ok
        text.append(f"  witness: {None if v.witness is None else list(v.witness)}; {v.reason} (re-checked: {ok})")
    if args.b2 is not None:
        n = elemabel_fixed_points(args.p, form, args.b2, cfg.search_cap)
        payload["fixed_points"] = n
        text.append(f"  fixed points of C{args.p}xC{args.p}: {n if n is not None else 'no conclusion'}")
    return EXIT_OK, payload, "\n".join(text)


def cmd_survey(args, cfg):
    from ..engine import survey
    from ..group.catalog import full_catalog

    cat = [e for e in full_catalog(max(args.max_order, 1), include_s5=not args.no_s5) if e.order <= args.max_order]
    rep = survey(cat, args.b2, parallelism=cfg.parallelism)
    payload = rep.to_dict()
    for r in payload["rows"]:
        r.pop("detail")
    width = max([len(r.name) for r in rep.rows] + [5])
    lines = [f"{'group':<{width}}  {'label':<14} {'order':>5}  cyclic  {'verdict':<15} steps  summary"]
    for r in rep.rows:
        v = r.verdict
        lines.append(f"{r.name:<{width}}  {r.label:<14} {r.order:>5}  {'yes' if r.cyclic else 'no':<6}  "
                     f"{v.kind if v else 'ERROR':<15} {v.count_steps() if v else 0:>5}  "
                     f"{v.describe() if v else r.error}")
    counts = rep.counts()
    lines.append(f"{len(rep.rows)} groups, b2 = {args.b2}: {counts}; consistent: {rep.consistent}")
    code = EXIT_CONTRADICTION if rep.contradictions else EXIT_OK
    return code, payload, "\n".join(lines)


def cmd_lattice(args, cfg):
    from ..group.lattice import all_subgroups

    G = _group(args.spec, cfg)
    lat = all_subgroups(G, cfg.order_cap)
    cls = lat.class_of
    rows = []
    for i in lat:
        H = lat.subgroup_group(i)
        rows.append({
            "index": i, "order": lat.order(i), "label": lat.label(i), "class": cls[i],
            "normal": lat.is_normal(i), "maximal": i in lat.maximal,
            "generators": [g.cycle_string() for g in H.generators],
        })
    payload = {"group": args.spec, "label": G.label, "order": G.order, "count": len(rows),
               "classes": len(lat.conjugacy_classes), "subgroups": rows}
    lines = [f"{args.spec} [{G.label}, order {G.order}]: {len(rows)} subgroups in {len(lat.conjugacy_classes)} classes"]
    for r in rows:
        flags = ("N" if r["normal"] else "-") + ("M" if r["maximal"] else "-")
        lines.append(f"  #{r['index']:<4} {r['order']:>5}  {r['label']:<14} class {r['class']:<4} {flags}  "
                     f"<{', '.join(r['generators'])}>")
    return EXIT_OK, payload, "\n".join(lines)


COMMANDS = {
    "analyze": cmd_analyze,
    "cohomology": cmd_cohomology,
    "dichotomy": cmd_dichotomy,
    "orbits": cmd_orbits,
    "collapse": cmd_collapse,
    "survey": cmd_survey,
    "lattice": cmd_lattice,
}


def _error_code(exc: Exception) -> int:
    if isinstance(exc, InternalContradiction):
        return EXIT_CONTRADICTION
    if isinstance(exc, (OrderCapExceeded, ResourceBound, SearchBound)):
        return EXIT_RESOURCE
    return EXIT_USAGE


def _wants_json(argv, config) -> bool:
    for i, a in enumerate(argv):
        if a == "--format=json" or (a == "--format" and i + 1 < len(argv) and argv[i + 1] == "json"):
            return True
    return config is not None and config.format == "json"


def run_command(argv, config: RunConfig | None = None) -> tuple[int, str]:
    """Run one command; returns (exit code, text written to stdout)."""
    argv = list(argv)
    parser = build_parser()
    as_json = _wants_json(argv, config)
    try:
        err = io.StringIO()
        try:
            with redirect_stderr(err):
                args = parser.parse_args(argv)
        except SystemExit as exc:  # --help and --version
            return int(exc.code or 0), err.getvalue()
        cfg = config if config is not None else load_config(args.config)
        cfg = cfg.with_overrides(
            format=args.format, order_cap=args.order_cap, search_cap=args.search_cap,
            oracle_degree_cap=args.oracle_degree_cap, parallelism=args.parallelism,
        )
        as_json = cfg.format == "json"
        code, payload, text = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        return _error_out(EXIT_USAGE, "UsageError", str(exc), as_json)
    except PseudofreeError as exc:
        return _error_out(_error_code(exc), type(exc).__name__, str(exc), as_json)
    if as_json:
        payload = {"command": args.command, "exit_code": code, **payload}
        return code, _dump(payload)
    return code, text


def _error_out(code: int, kind: str, message: str, as_json: bool) -> tuple[int, str]:
    if as_json:
        return code, _dump({"error": kind, "message": message, "exit_code": code})
    return code, f"error ({kind}): {message}"


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if any(a in ("-h", "--help") for a in argv):
        # let argparse print help to stdout directly
        try:
            build_parser().parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
    code, out = run_command(argv)
    stream = sys.stdout if code == EXIT_OK or out.lstrip().startswith("{") else sys.stderr
    print(out, file=stream)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
