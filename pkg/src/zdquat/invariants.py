"""Closed-form predictions and the engine that checks them against computation.

Predictions below only ever look at the factorization of n.  Computed values
come from enumeration, graph construction and search, and never consult the
closed forms.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from typing import Any

import numpy as np

from . import __version__
from .domination import (
    DEFAULT_MAX_VERTICES,
    DEFAULT_NODE_BUDGET,
    certificate_shape,
    closed_form_certificate,
    exact_gamma,
    verify_dominating,
)
from .errors import BudgetExceededError
from .lipschitz import DEFAULT_ELEMENT_BUDGET, DEFAULT_PAIR_BUDGET, class_labels
from .oracles import QuaternionRing
from .ring_core import RingSpec, factorize
from .zdgraph import (
    DEFAULT_MEM_BUDGET,
    asymmetric_edge,
    build_graph,
    diameter,
    girth,
    is_complete,
    is_complete_bipartite,
    is_symmetric_digraph,
)

SCHEMA_VERSION = "zdquat-report/1"
UNSTATED = "unstated"
UNCOVERED = "uncovered"
SKIPPED = "skipped"

FIELDS = (
    "vertex_count",
    "unit_count",
    "diameter_undirected",
    "diameter_directed",
    "girth_undirected",
    "girth_directed",
    "is_complete",
    "is_complete_bipartite",
    "is_symmetric_digraph",
    "domination",
    "certificate_valid",
)
DEPTH_FIELDS = {
    "counts": FIELDS[:2],
    "graph": FIELDS[:9],
    "full": FIELDS,
}


def _odd_unit_factor(p: int, a: int) -> int:
    return p ** (4 * a) - p ** (4 * a - 1) - p ** (4 * a - 2) + p ** (4 * a - 3)


def predict_unit_count(spec: RingSpec) -> int:
    count = math.prod(_odd_unit_factor(p, a) for p, a in spec.odd_factors)
    t = spec.two_part
    return count if t == 0 else 2 ** (4 * t - 1) * count


def predict_vertex_count(spec: RingSpec) -> int:
    return spec.n**4 - predict_unit_count(spec) - 1


def predict_diameter(spec: RingSpec) -> int:
    return 2 if spec.is_prime_power else 3


def predict_girths(spec: RingSpec) -> tuple[int, int | str]:
    """(undirected girth, directed girth or ``"unstated"``)."""
    return 3, (2 if spec.n % 2 == 0 else UNSTATED)


def predict_domination(spec: RingSpec) -> int | str:
    if spec.is_power_of_two:
        return 1
    shape = certificate_shape(spec)
    if shape is None:
        return UNCOVERED
    s, primes = shape
    return (1 if s > 0 else 0) + len(primes) + sum(primes)


def predict_symmetric_digraph(spec: RingSpec) -> bool | str:
    return True if spec.is_power_of_two else UNSTATED


def predictions(spec: RingSpec) -> dict[str, Any]:
    diam = predict_diameter(spec)
    g_und, g_dir = predict_girths(spec)
    return {
        "vertex_count": predict_vertex_count(spec),
        "unit_count": predict_unit_count(spec),
        "diameter_undirected": diam,
        "diameter_directed": diam,
        "girth_undirected": g_und,
        "girth_directed": g_dir,
        "is_complete": False,
        "is_complete_bipartite": False,
        "is_symmetric_digraph": predict_symmetric_digraph(spec),
        "domination": predict_domination(spec),
        "certificate_valid": True if certificate_shape(spec) is not None else UNCOVERED,
    }


@dataclass(frozen=True)
class Budgets:
    element: int = DEFAULT_ELEMENT_BUDGET
    pair: int = DEFAULT_PAIR_BUDGET
    mem: int = DEFAULT_MEM_BUDGET
    node: int = DEFAULT_NODE_BUDGET
    max_vertices: int = DEFAULT_MAX_VERTICES


def _jsonable(x: Any) -> Any:
    if isinstance(x, float):
        if math.isinf(x):
            return "infinity"
        if x.is_integer():
            return int(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, tuple):
        return [_jsonable(t) for t in x]
    if isinstance(x, list):
        return [_jsonable(t) for t in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


@dataclass
class InvariantReport:
    """Predicted vs computed values for one ring.

    ``fields`` fixes which keys appear and in what order; ``kind`` names the
    producing command (a verify depth, ``info``, ``dominate`` ...).
    """

    spec: RingSpec
    kind: str
    fields: tuple[str, ...]
    predicted: dict[str, Any] = field(default_factory=dict)
    computed: dict[str, Any] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)
    timing_us: dict[str, int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    budget_exhausted: bool = False
    ring: str = ""

    def __post_init__(self) -> None:
        if not self.ring:
            self.ring = f"Z_{self.spec.n}[i,j,k]"

    @property
    def match(self) -> dict[str, bool | None]:
        """True/False where both sides are definite, None otherwise."""
        out: dict[str, bool | None] = {}
        for f in self.fields:
            p, c = self.predicted.get(f, UNSTATED), self.computed.get(f, SKIPPED)
            if p in (UNSTATED, UNCOVERED) or c == SKIPPED:
                out[f] = None
            else:
                out[f] = _jsonable(p) == _jsonable(c)
        return out

    @property
    def mismatches(self) -> list[str]:
        return [f for f, ok in self.match.items() if ok is False]

    @property
    def all_match(self) -> bool:
        return not self.mismatches

    def stable_dict(self) -> dict[str, Any]:
        fields = self.fields
        return {
            "spec": {"ring": self.ring, "n": self.spec.n, "factors": [list(f) for f in self.spec.factors]},
            "predicted": {f: _jsonable(self.predicted.get(f, UNSTATED)) for f in fields},
            "computed": {f: _jsonable(self.computed.get(f, SKIPPED)) for f in fields},
            "match": self.match,
            "witnesses": _jsonable(self.witnesses),
        }

    def to_dict(self) -> dict[str, Any]:
        out = self.stable_dict()
        out["meta"] = {
            "schema": SCHEMA_VERSION,
            "version": __version__,
            "numpy": _pkg_version("numpy"),
            "kind": self.kind,
            "budget_exhausted": self.budget_exhausted,
            "notes": list(self.notes),
            "timing_us": dict(self.timing_us),
        }
        return out

    def to_json(self, stable_only: bool = False) -> str:
        payload = self.stable_dict() if stable_only else self.to_dict()
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _pkg_version(name: str) -> str:
    try:
        return version(name)
    except PackageNotFoundError:  # pragma: no cover
        return "unknown"


class _Timer:
    def __init__(self, report: InvariantReport, key: str) -> None:
        self.report, self.key = report, key

    def __enter__(self) -> None:
        self.t0 = time.perf_counter()

    def __exit__(self, *exc: object) -> None:
        self.report.timing_us[self.key] = int((time.perf_counter() - self.t0) * 1e6)


def verify(
    spec: RingSpec | int,
    depth: str = "counts",
    budgets: Budgets | None = None,
    threads: int = 1,
) -> InvariantReport:
    """Compute the invariants of Z_n[i,j,k] and compare them with the closed forms.

    ``depth`` is ``counts``, ``graph`` or ``full``.  A budget overrun marks the
    affected fields as skipped instead of failing the whole report.
    """
    if isinstance(spec, int):
        spec = factorize(spec)
    if depth not in DEPTH_FIELDS:
        raise ValueError(f"unknown depth {depth!r}")
    budgets = budgets or Budgets()
    rep = InvariantReport(spec, depth, DEPTH_FIELDS[depth], predictions(spec))

    with _Timer(rep, "counts"):
        try:
            labels = class_labels(spec, budgets.element)
        except BudgetExceededError as exc:
            rep.budget_exhausted = True
            rep.notes.append(str(exc))
            return rep
        rep.computed["vertex_count"] = int((labels == 2).sum())
        rep.computed["unit_count"] = int((labels == 1).sum())
    if depth == "counts":
        return rep

    ring = QuaternionRing(spec, budgets.element)
    try:
        with _Timer(rep, "build"):
            und = build_graph(ring, directed=False, mem_budget=budgets.mem, threads=threads)
            dirg = build_graph(ring, directed=True, mem_budget=budgets.mem, threads=threads)
    except BudgetExceededError as exc:
        rep.budget_exhausted = True
        rep.notes.append(str(exc))
        return rep

    with _Timer(rep, "diameter"):
        d_und, d_dir = diameter(und), diameter(dirg)
    rep.computed["diameter_undirected"] = d_und.diameter
    rep.computed["diameter_directed"] = d_dir.diameter
    rep.witnesses["diameter_path_undirected"] = d_und.witness
    rep.witnesses["diameter_path_directed"] = d_dir.witness
    for d in (d_und.diameter, d_dir.diameter):
        if d > 3:
            rep.notes.append(f"distance bound violated: diameter {d} > 3")

    with _Timer(rep, "girth"):
        g_und, g_dir = girth(und), girth(dirg)
    rep.computed["girth_undirected"] = g_und.girth
    rep.computed["girth_directed"] = g_dir.girth
    rep.witnesses["girth_cycle_undirected"] = g_und.cycle
    rep.witnesses["girth_cycle_directed"] = g_dir.cycle

    with _Timer(rep, "shape"):
        rep.computed["is_complete"] = is_complete(und)
        rep.computed["is_complete_bipartite"] = is_complete_bipartite(und)
        rep.computed["is_symmetric_digraph"] = is_symmetric_digraph(dirg)
        rep.witnesses["asymmetric_edge"] = asymmetric_edge(dirg)
    rep.witnesses["self_annihilating"] = und.self_annihilating
    if depth == "graph":
        return rep

    with _Timer(rep, "domination"):
        try:
            res = exact_gamma(und, node_budget=budgets.node, max_vertices=budgets.max_vertices)
        except BudgetExceededError as exc:
            rep.budget_exhausted = True
            rep.notes.append(str(exc))
            res = None
        if res is not None:
            rep.witnesses["dominating_set"] = list(res.certificate)
            rep.witnesses["domination_bounds"] = [res.lo, res.hi]
            rep.witnesses["domination_nodes"] = res.explored_nodes
            if res.exact:
                rep.computed["domination"] = res.gamma
            else:
                rep.budget_exhausted = True
                rep.notes.append(
                    f"domination search hit its node budget; only bounds [{res.lo}, {res.hi}] are certified"
                )
    with _Timer(rep, "certificate"):
        if certificate_shape(spec) is not None:
            cert = [z.code for z in closed_form_certificate(spec)]
            rep.computed["certificate_valid"] = verify_dominating(und, cert)
            rep.witnesses["closed_form_certificate"] = cert
    return rep
