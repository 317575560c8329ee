"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 budget exhausted, 3 a closed-form
prediction disagrees with a computed value.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from itertools import product
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .domination import (
    dominates_ring,
    closed_form_certificate,
    exact_gamma,
    greedy_upper,
    probe_open_problems,
    verify_dominating,
)
from .errors import BudgetExceededError, NoClosedFormError, ZdquatError
from .invariants import (
    SKIPPED,
    UNCOVERED,
    UNSTATED,
    Budgets,
    InvariantReport,
    predict_domination,
    predict_symmetric_digraph,
    predict_unit_count,
    predict_vertex_count,
    verify,
)
from .lipschitz import class_labels, reversibility_scan
from .mat2 import (
    Mat2,
    ann_left,
    ann_right,
    det_array,
    mat_array,
    mmul_array,
    nonzero_zero_divisors,
    orbit_reduce,
    orbit_reps,
)
from .oracles import QuaternionRing
from .ring_core import factorize
from .schema import validate_report
from .zdgraph import build_graph, export

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_MISMATCH = 0, 1, 2, 3

ENV_PREFIX = "ZDQUAT_"
BUDGET_FLAGS = {
    "element_budget": Budgets.element,
    "pair_budget": Budgets.pair,
    "mem_budget": Budgets.mem,
    "node_budget": Budgets.node,
    "max_vertices": Budgets.max_vertices,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# argument types


def _int(text: str) -> int:
    text = text.strip()
    try:
        if "**" in text:
            base, exp = text.split("**")
            return int(base, 0) ** int(exp, 0)
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _modulus(text: str) -> int:
    n = _int(text)
    if n < 2:
        raise argparse.ArgumentTypeError(f"modulus must be >= 2, got {n}")
    return n


def _modulus_range(text: str) -> list[int]:
    if "-" in text.strip("-"):
        lo_s, hi_s = text.split("-", 1)
        lo, hi = _modulus(lo_s), _modulus(hi_s)
        if lo > hi:
            raise argparse.ArgumentTypeError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [_modulus(text)]


def _prime(text: str) -> int:
    p = _modulus(text)
    if factorize(p).factors != ((p, 1),):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _env_default(name: str, fallback: int) -> int:
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return fallback
    try:
        return _int(raw)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{ENV_PREFIX + name.upper()}: {exc}") from None


# ---------------------------------------------------------------------------
# output helpers


def _budgets(args: argparse.Namespace) -> Budgets:
    return Budgets(
        element=args.element_budget,
        pair=args.pair_budget,
        mem=args.mem_budget,
        node=args.node_budget,
        max_vertices=args.max_vertices,
    )


def _exit_code(rep: InvariantReport) -> int:
    if rep.mismatches:
        return EXIT_MISMATCH
    if rep.budget_exhausted:
        return EXIT_BUDGET
    return EXIT_OK


def _fmt(x: Any) -> str:
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, float) and x == float("inf"):
        return "inf"
    if x is None:
        return "-"
    return str(x)


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    line = lambda cells: "  ".join(c.rjust(w) for c, w in zip(cells, widths)).rstrip()  # noqa: E731
    out = [line(header), line(["-" * w for w in widths])]
    out.extend(line(r) for r in rows)
    return "\n".join(out)


def _describe(rep: InvariantReport) -> str:
    rows = []
    match = rep.match
    for f in rep.fields:
        m = match[f]
        rows.append(
            [
                f,
                _fmt(rep.predicted.get(f, UNSTATED)),
                _fmt(rep.computed.get(f, SKIPPED)),
                "-" if m is None else ("ok" if m else "MISMATCH"),
            ]
        )
    text = [f"{rep.ring}  (n = {rep.spec})", _table(["field", "predicted", "computed", "match"], rows)]
    text.extend(f"note: {n}" for n in rep.notes)
    return "\n".join(text)


def _emit(args: argparse.Namespace, reports: list[InvariantReport], human: Callable[[], str]) -> int:
    if args.json:
        payload: Any = [r.to_dict() for r in reports] if args.multi else reports[0].to_dict()
        validate_report(payload)
        sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(human() + "\n")
    return max(_exit_code(r) for r in reports)


# ---------------------------------------------------------------------------
# commands


def cmd_info(args: argparse.Namespace) -> int:
    spec = factorize(args.n)
    fields = ("order", "vertex_count", "unit_count", "reversible")
    rep = InvariantReport(spec, "info", fields)
    rep.predicted.update(
        order=spec.n**4,
        vertex_count=predict_vertex_count(spec),
        unit_count=predict_unit_count(spec),
        reversible=predict_symmetric_digraph(spec),
    )
    rep.witnesses["closed_form_domination"] = predict_domination(spec)
    t0 = time.perf_counter()
    try:
        labels = class_labels(spec, args.element_budget)
        rep.computed.update(
            order=int(labels.size),
            vertex_count=int((labels == 2).sum()),
            unit_count=int((labels == 1).sum()),
        )
        pair = reversibility_scan(spec, args.pair_budget, args.element_budget)
        rep.computed["reversible"] = pair is None
        rep.witnesses["reversibility_violation"] = None if pair is None else [z.code for z in pair]
    except BudgetExceededError as exc:
        rep.budget_exhausted = True
        rep.notes.append(str(exc))
    rep.timing_us["info"] = int((time.perf_counter() - t0) * 1e6)
    return _emit(args, [rep], lambda: _describe(rep))


def cmd_build(args: argparse.Namespace) -> int:
    if args.json and not args.out:
        raise UsageError("--json needs --out (the graph itself goes to standard output otherwise)")
    spec = factorize(args.n)
    t0 = time.perf_counter()
    g = build_graph(
        QuaternionRing(spec, args.element_budget),
        directed=args.directed,
        mode=args.mode,
        mem_budget=args.mem_budget,
        threads=args.threads,
    )
    data = export(g, args.format)
    if not args.out:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return EXIT_OK
    with open(args.out, "wb") as fh:
        fh.write(data)
    rep = InvariantReport(spec, "build", ("vertex_count", "edge_count"))
    rep.predicted["vertex_count"] = predict_vertex_count(spec)
    rep.computed.update(vertex_count=g.vertex_count, edge_count=g.edge_count())
    rep.witnesses.update(format=args.format, directed=args.directed, bytes=len(data))
    rep.timing_us["build"] = int((time.perf_counter() - t0) * 1e6)
    kind = "directed" if args.directed else "undirected"
    return _emit(
        args,
        [rep],
        lambda: f"wrote {kind} graph of {rep.ring}: {g.vertex_count} vertices, "
        f"{g.edge_count()} edges -> {args.out} ({args.format})",
    )


_VERIFY_COLUMNS = {
    "counts": [("|V|", "vertex_count"), ("units", "unit_count")],
    "graph": [
        ("|V|", "vertex_count"),
        ("units", "unit_count"),
        ("diam", "diameter_undirected"),
        ("diam->", "diameter_directed"),
        ("girth", "girth_undirected"),
        ("girth->", "girth_directed"),
        ("sym->", "is_symmetric_digraph"),
    ],
}
_VERIFY_COLUMNS["full"] = _VERIFY_COLUMNS["graph"] + [("gamma", "domination"), ("cert", "certificate_valid")]


def _verify_table(reports: list[InvariantReport], depth: str) -> str:
    cols = _VERIFY_COLUMNS[depth]
    rows, details = [], []
    for rep in reports:
        match = rep.match
        cells = [str(rep.spec.n)]
        for _, f in cols:
            cell = _fmt(rep.computed.get(f, SKIPPED))
            if match[f] is False:
                cell += "!"
                details.append(
                    f"n={rep.spec.n}: {f} predicted {_fmt(rep.predicted[f])}, computed {_fmt(rep.computed[f])}"
                )
            elif rep.predicted.get(f) in (UNSTATED, UNCOVERED) and f in rep.computed:
                cell += "?"
            cells.append(cell)
        status = "MISMATCH" if rep.mismatches else ("budget" if rep.budget_exhausted else "ok")
        cells.append(status)
        rows.append(cells)
        details.extend(f"n={rep.spec.n}: {note}" for note in rep.notes)
    text = _table(["n"] + [c for c, _ in cols] + ["status"], rows)
    legend = "'!' computed value disagrees with the closed form; '?' no closed form, computed value shown"
    return "\n".join([text, legend] + details)


def cmd_verify(args: argparse.Namespace) -> int:
    reports = []
    for n in args.target:
        reports.append(verify(n, args.depth, _budgets(args), threads=args.threads))
    args.multi = len(args.target) > 1
    return _emit(args, reports, lambda: _verify_table(reports, args.depth))


def cmd_dominate(args: argparse.Namespace) -> int:
    spec = factorize(args.n)
    node_budget = args.budget if args.budget is not None else args.node_budget
    predicted = predict_domination(spec)
    t0 = time.perf_counter()
    if args.method == "certificate":
        try:
            cert = closed_form_certificate(spec)
        except NoClosedFormError as exc:
            raise UsageError(str(exc)) from None
        codes = [z.code for z in cert]
        rep = InvariantReport(spec, "dominate-certificate", ("certificate_size", "certificate_valid"))
        rep.predicted.update(certificate_size=predicted, certificate_valid=True)
        rep.computed.update(certificate_size=len(codes), certificate_valid=dominates_ring(spec, codes, args.element_budget))
        rep.witnesses["certificate"] = codes
    else:
        g = build_graph(QuaternionRing(spec, args.element_budget), mem_budget=args.mem_budget, threads=args.threads)
        if args.method == "greedy":
            rep = InvariantReport(spec, "dominate-greedy", ("domination_upper_bound",))
            res = greedy_upper(g)
            rep.predicted["domination_upper_bound"] = UNSTATED
            rep.computed["domination_upper_bound"] = res.hi
        else:
            rep = InvariantReport(spec, "dominate-exact", ("domination",))
            rep.predicted["domination"] = predicted
            res = exact_gamma(g, node_budget=node_budget, max_vertices=args.max_vertices)
            if res.exact:
                rep.computed["domination"] = res.gamma
            else:
                rep.budget_exhausted = True
                rep.notes.append(f"node budget exhausted; certified bounds [{res.lo}, {res.hi}]")
            rep.witnesses.update(bounds=[res.lo, res.hi], explored_nodes=res.explored_nodes)
        rep.witnesses["certificate"] = list(res.certificate)
        rep.witnesses["certificate_valid"] = verify_dominating(g, res.certificate)
    rep.timing_us["dominate"] = int((time.perf_counter() - t0) * 1e6)
    return _emit(args, [rep], lambda: _describe(rep))


def _orbit_partition(p: int) -> tuple[list[set[int]], set[int]]:
    """Orbits of the representatives under all invertible matrices, by brute force."""
    arr = mat_array(p)
    dets = det_array(arr, p) % p
    units = arr[dets != 0]
    zd = {int(c) for c in np.flatnonzero(dets == 0) if c != 0}
    base = p ** np.arange(4, dtype=np.int64)
    orbits = []
    for rep in orbit_reps(p):
        m = np.array(rep.matrix().entries, dtype=np.int64)
        prods = mmul_array(units, np.broadcast_to(m, units.shape), p)
        orbits.append({int(c) for c in prods @ base})
    return orbits, zd


def cmd_orbits(args: argparse.Namespace) -> int:
    p = args.p
    spec = factorize(p)
    t0 = time.perf_counter()
    orbits, zd = _orbit_partition(p)
    union = set().union(*orbits)
    disjoint = sum(len(o) for o in orbits) == len(union)
    # the row reduction must certify U x = rep with U invertible, and agree
    # with the brute-force orbits above
    consistent = True
    for c in sorted(zd):
        x = Mat2.from_code(c, spec)
        u, r = orbit_reduce(x)
        consistent &= u.is_unit() and u * x == r.matrix() and c in orbits[_rep_index(p, r)]
    fields = ("zero_divisor_count", "orbit_count", "orbits_partition", "reduction_consistent")
    rep = InvariantReport(spec, "orbits", fields, ring=f"M_2(Z_{p})")
    rep.predicted.update(
        zero_divisor_count=p**3 + p**2 - p - 1, orbit_count=p + 1, orbits_partition=True, reduction_consistent=True
    )
    rep.computed.update(
        zero_divisor_count=len(zd),
        orbit_count=len(orbits),
        orbits_partition=disjoint and union == zd,
        reduction_consistent=consistent,
    )
    rep.witnesses["orbits"] = [
        {"representative": str(r.matrix()), "size": len(o)} for r, o in zip(orbit_reps(p), orbits)
    ]
    rep.timing_us["orbits"] = int((time.perf_counter() - t0) * 1e6)
    return _emit(args, [rep], lambda: _describe(rep) + "\n" + _table(
        ["representative", "orbit size"],
        [[w["representative"], str(w["size"])] for w in rep.witnesses["orbits"]],
    ))


def _rep_index(p: int, rep: Any) -> int:
    return p if rep.kind == "e22" else rep.a


def cmd_annihilators(args: argparse.Namespace) -> int:
    p = args.p
    spec = factorize(p)
    t0 = time.perf_counter()
    rights, lefts = set(), set()
    sizes = set()
    for x in nonzero_zero_divisors(p):
        r, l = ann_right(x), ann_left(x)
        sizes.update((len(r), len(l)))
        rights.add(frozenset(y.code for y in r))
        lefts.add(frozenset(y.code for y in l))
    mixed = {len(r & l) for r, l in product(rights, lefts)}
    same = {len(a & b) for side in (rights, lefts) for a, b in product(side, side) if a != b}
    fields = ("annihilator_sizes", "mixed_intersection_sizes", "same_side_intersection_sizes")
    rep = InvariantReport(spec, "annihilators", fields, ring=f"M_2(Z_{p})")
    rep.predicted.update(
        annihilator_sizes=[p**2], mixed_intersection_sizes=[p], same_side_intersection_sizes=[1]
    )
    rep.computed.update(
        annihilator_sizes=sorted(sizes),
        mixed_intersection_sizes=sorted(mixed),
        same_side_intersection_sizes=sorted(same),
    )
    rep.witnesses.update(distinct_right=len(rights), distinct_left=len(lefts))
    rep.timing_us["annihilators"] = int((time.perf_counter() - t0) * 1e6)
    return _emit(args, [rep], lambda: _describe(rep))


def cmd_probe(args: argparse.Namespace) -> int:
    target = args.target
    if target == "pt" and len(args.params) != 2:
        raise UsageError("probe pt needs two parameters: p t")
    if target == "matrix" and len(args.params) != 2:
        raise UsageError("probe matrix needs two parameters: size q")
    t0 = time.perf_counter()
    try:
        report = probe_open_problems(
            target, args.params, node_budget=args.node_budget, max_vertices=args.max_vertices
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    modulus = args.params[0] ** args.params[1] if target == "pt" else args.params[1]
    rep = InvariantReport(factorize(modulus), f"probe-{target}", ("vertex_count", "domination"), ring=report.ring)
    rep.predicted.update(vertex_count=UNSTATED, domination=UNSTATED)
    res = report.result
    rep.computed["vertex_count"] = report.vertex_count
    if res.exact:
        rep.computed["domination"] = res.gamma
    else:
        rep.budget_exhausted = True
        rep.notes.append(f"node budget exhausted; certified bounds [{res.lo}, {res.hi}]")
    rep.notes.append(report.status)
    rep.witnesses.update(
        bounds=[res.lo, res.hi], certificate=list(res.certificate), explored_nodes=res.explored_nodes
    )
    rep.timing_us["probe"] = int((time.perf_counter() - t0) * 1e6)
    return _emit(args, [rep], lambda: _describe(rep))


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the full JSON report on standard output")
    common.add_argument(
        "--threads",
        type=_int,
        default=_env_default("threads", os.cpu_count() or 1),
        help="worker cap (default: available cores; env ZDQUAT_THREADS)",
    )
    for name, default in BUDGET_FLAGS.items():
        flag = "--" + name.replace("_", "-")
        env = ENV_PREFIX + name.upper()
        common.add_argument(
            flag, type=_int, default=_env_default(name, default), help=f"default {default}; env {env}"
        )
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(
        prog="zdquat",
        description="Zero-divisor graphs of the Lipschitz quaternions modulo n.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("info", parents=[common], help="ring facts: counts and reversibility")
    p.add_argument("n", type=_modulus)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("build", parents=[common], help="export the zero-divisor graph")
    p.add_argument("n", type=_modulus)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--format", choices=["dot", "edge-list"], default="edge-list")
    p.add_argument("--mode", choices=["explicit", "implicit"], default="explicit")
    p.add_argument("--out", help="output path (default: standard output)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", parents=[common], help="compare closed forms with computed invariants")
    p.add_argument("target", type=_modulus_range, help="n or an inclusive range such as 2-8")
    p.add_argument("--depth", choices=["counts", "graph", "full"], default="counts")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dominate", parents=[common], help="dominating sets")
    p.add_argument("n", type=_modulus)
    p.add_argument("--method", choices=["greedy", "exact", "certificate"], default="exact")
    p.add_argument("--budget", type=_int, default=None, help="node budget for the exact search")
    p.set_defaults(func=cmd_dominate)

    p = sub.add_parser("orbits", parents=[common], help="left unit-action orbits on singular M_2(Z_p)")
    p.add_argument("p", type=_prime)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("annihilators", parents=[common], help="annihilator sizes and intersections in M_2(Z_p)")
    p.add_argument("p", type=_prime)
    p.set_defaults(func=cmd_annihilators)

    p = sub.add_parser("probe", parents=[common], help="domination numbers with no known closed form")
    p.add_argument("target", choices=["pt", "matrix"])
    p.add_argument("params", type=_modulus, nargs="+", help="pt: p t; matrix: size q")
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"zdquat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    args.multi = False
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"zdquat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"zdquat: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ZdquatError as exc:
        print(f"zdquat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
