"""Dominating sets: certificates from closed-form constructions, a greedy
upper bound and an exact branch-and-bound solver.

The solver works on closed neighbourhoods stored as Python ints (bit i set
for vertex index i).  Pruning combines a covering lower bound, exclusion of
already explored branch candidates, candidate dominance, and twin
symmetry: two vertices with the same open neighbourhood can be swapped by a
graph automorphism, so only one of them needs to be tried whenever both have
the same status in the current search state.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExceededError, NoClosedFormError
from .lipschitz import (
    DEFAULT_ELEMENT_BUDGET,
    ElementClass,
    LipschitzQuat,
    class_codes,
    codes_to_array,
    quat_crt_join,
    zero_product_matrix,
)
from .mat2 import Mat2, find_uv, mat_to_quat
from .oracles import MatrixRing, QuaternionRing
from .ring_core import RingSpec, factorize
from .zdgraph import ZdGraph, build_graph, unpack_rows

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10**8
DEFAULT_MAX_VERTICES = 1000


@dataclass
class DominationResult:
    gamma: int | None
    lo: int
    hi: int
    certificate: tuple[int, ...]
    method: str  # "exact", "certified-upper" or "bounds-only"
    explored_nodes: int = 0
    elapsed: float = 0.0

    @property
    def exact(self) -> bool:
        return self.method == "exact"


def closed_neighborhoods(g: ZdGraph) -> list[int]:
    out = []
    for i in range(g.vertex_count):
        packed = np.packbits(unpack_rows(g.row(i), g.vertex_count), bitorder="little")
        mask = int.from_bytes(packed.tobytes(), "little") | (1 << i)
        out.append(mask)
    if g.directed:
        # domination is taken in the underlying undirected graph
        for i in range(g.vertex_count):
            m = out[i]
            while m:
                low = m & -m
                j = low.bit_length() - 1
                out[j] |= 1 << i
                m ^= low
    return out


def _indices(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def verify_dominating(g: ZdGraph, codes: Sequence[int]) -> bool:
    """True iff the closed neighbourhoods of ``codes`` cover every vertex."""
    idx = [g.index(c) for c in codes]
    if not idx:
        return g.vertex_count == 0
    nbhd = closed_neighborhoods(g)
    covered = 0
    for i in idx:
        covered |= nbhd[i]
    return covered == (1 << g.vertex_count) - 1


def dominates_ring(spec: RingSpec, codes: Sequence[int], element_budget: int = DEFAULT_ELEMENT_BUDGET) -> bool:
    """Domination check straight from ring products, without building the graph.

    Every nonzero zero divisor must be in ``codes`` or annihilate one of its
    members on either side.  Cost is |codes| * |V| products, so this scales to
    rings whose full adjacency would not fit in memory.
    """
    vertices = class_codes(spec, ElementClass.ZERO_DIVISOR, element_budget)
    codes = [int(c) for c in codes]
    members = set(vertices.tolist())
    if not codes or any(c not in members for c in codes):
        return False
    varr = codes_to_array(vertices, spec.n)
    carr = codes_to_array(np.array(codes, dtype=np.int64), spec.n)
    covered = np.isin(vertices, codes)
    covered |= zero_product_matrix(carr, varr, spec.n).any(axis=0)
    covered |= zero_product_matrix(varr, carr, spec.n).any(axis=1)
    return bool(covered.all())


def greedy_upper(g: ZdGraph, nbhd: list[int] | None = None) -> DominationResult:
    """Max-coverage greedy; ties go to the smallest vertex code."""
    start = time.perf_counter()
    nbhd = nbhd if nbhd is not None else closed_neighborhoods(g)
    uncovered = (1 << g.vertex_count) - 1
    chosen: list[int] = []
    while uncovered:
        best, best_gain = -1, -1
        for i, m in enumerate(nbhd):
            gain = (m & uncovered).bit_count()
            if gain > best_gain:
                best, best_gain = i, gain
        chosen.append(best)
        uncovered &= ~nbhd[best]
    cert = tuple(sorted(int(g.codes[i]) for i in chosen))
    return DominationResult(None, 1, len(chosen), cert, "certified-upper", 0, time.perf_counter() - start)


def twin_classes(nbhd: list[int]) -> tuple[list[int], list[int]]:
    """Class ids for equal open neighbourhoods and for equal closed ones.

    Swapping two vertices of the same class is a graph automorphism.
    """
    open_seen: dict[int, int] = {}
    closed_seen: dict[int, int] = {}
    open_ids, closed_ids = [], []
    for i, m in enumerate(nbhd):
        open_ids.append(open_seen.setdefault(m & ~(1 << i), i))
        closed_ids.append(closed_seen.setdefault(m, i))
    return open_ids, closed_ids


class _Abort(Exception):
    pass


@dataclass
class _Search:
    nbhd: list[int]
    twins: tuple[list[int], list[int]]
    node_budget: int
    order: list[int]
    best: list[int] = field(default_factory=list)
    nodes: int = 0

    def lower_bound(self, uncovered: int, allowed: int) -> int:
        need = uncovered.bit_count()
        gains = sorted(((self.nbhd[c] & uncovered).bit_count() for c in _indices(allowed)), reverse=True)
        total = 0
        for k, gain in enumerate(gains, 1):
            if gain == 0:
                break
            total += gain
            if total >= need:
                return k
        return len(self.nbhd) + 1  # cannot be covered from the allowed set

    def branch_vertex(self, uncovered: int, allowed: int) -> tuple[int, list[int]]:
        best_u, best_c = -1, None
        for u in self.order:
            if not (uncovered >> u) & 1:
                continue
            cands = self.nbhd[u] & allowed
            cnt = cands.bit_count()
            if best_c is None or cnt < best_c.bit_count():
                best_u, best_c = u, cands
                if cnt <= 1:
                    break
        return best_u, _indices(best_c or 0)

    def candidates(self, cands: list[int], uncovered: int) -> list[int]:
        # Candidates are allowed and never chosen, so two twins with the same
        # uncovered bit are interchangeable by an automorphism fixing the state.
        cover = {c: self.nbhd[c] & uncovered for c in cands}
        ranked = sorted(cands, key=lambda c: (-cover[c].bit_count(), c))
        open_ids, closed_ids = self.twins
        kept: list[int] = []
        reps: set[tuple[int, int, int]] = set()
        for c in ranked:
            bit = (uncovered >> c) & 1
            if (0, open_ids[c], bit) in reps or (1, closed_ids[c], bit) in reps:
                continue
            cc = cover[c]
            if any(cc & ~cover[k] == 0 for k in kept):
                continue
            reps.add((0, open_ids[c], bit))
            reps.add((1, closed_ids[c], bit))
            kept.append(c)
        return kept

    def run(self, uncovered: int, allowed: int, chosen: list[int]) -> None:
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise _Abort
        if not uncovered:
            if len(chosen) < len(self.best):
                self.best = list(chosen)
            return
        if len(chosen) + self.lower_bound(uncovered, allowed) >= len(self.best):
            return
        _, cands = self.branch_vertex(uncovered, allowed)
        if not cands:
            return
        cands = self.candidates(cands, uncovered)
        for c in cands:
            chosen.append(c)
            self.run(uncovered & ~self.nbhd[c], allowed & ~(1 << c), chosen)
            chosen.pop()
            allowed &= ~(1 << c)
            if len(chosen) + 1 >= len(self.best):
                return


def exact_gamma(
    g: ZdGraph,
    node_budget: int = DEFAULT_NODE_BUDGET,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> DominationResult:
    """Minimum dominating set by branch and bound.

    Branches on the uncovered vertex with the fewest admissible dominators.
    On budget exhaustion the result is ``bounds-only`` with the best
    certificate found so far as the upper end.
    """
    start = time.perf_counter()
    v = g.vertex_count
    nbhd = closed_neighborhoods(g)
    greedy = greedy_upper(g, nbhd)
    seed = [g.index(c) for c in greedy.certificate]
    order = sorted(range(v), key=lambda i: (nbhd[i].bit_count(), i))
    search = _Search(nbhd, twin_classes(nbhd), node_budget, order, best=seed)
    full = (1 << v) - 1
    root_lb = search.lower_bound(full, full)
    if root_lb < len(seed) and v > max_vertices:
        # the vertex cap only guards an actual search
        raise BudgetExceededError("exact domination", v, max_vertices, "vertex limit")
    try:
        search.run(full, full, [])
    except _Abort:
        cert = tuple(sorted(int(g.codes[i]) for i in search.best))
        log.info("domination search aborted after %d nodes", search.nodes)
        return DominationResult(
            None, root_lb, len(cert), cert, "bounds-only", search.nodes, time.perf_counter() - start
        )
    cert = tuple(sorted(int(g.codes[i]) for i in search.best))
    return DominationResult(
        len(cert), len(cert), len(cert), cert, "exact", search.nodes, time.perf_counter() - start
    )


# ---------------------------------------------------------------------------
# closed-form constructions


def certificate_shape(spec: RingSpec) -> tuple[int, tuple[int, ...]] | None:
    """``(s, odd primes)`` when n = 2^s * (odd squarefree), else None."""
    odd = spec.odd_factors
    if any(a != 1 for _, a in odd):
        return None
    return spec.two_part, tuple(p for p, _ in odd)


def _odd_prime_dominators(p: int) -> list[LipschitzQuat]:
    w = find_uv(p, 1)
    spec = factorize(p)
    mats = [Mat2(1, a, 0, 0, spec) for a in range(p)] + [Mat2(0, 0, 0, 1, spec)]
    return [mat_to_quat(x, w) for x in mats]


def closed_form_certificate(spec: RingSpec) -> list[LipschitzQuat]:
    """Dominating set built from the ring decomposition.

    * 2^t: the single element 2^(t-1) (1+i+j+k);
    * odd prime p: the pull-back of {[[1,a],[0,0]]} u {[[0,0],[0,1]]};
    * products of those: each factor's set embedded with zeros elsewhere.
    """
    shape = certificate_shape(spec)
    if shape is None:
        raise NoClosedFormError(f"no closed-form dominating set for n = {spec.n} ({spec})")
    s, primes = shape
    factor_specs = [factorize(q) for q in spec.prime_powers]
    zeros = [LipschitzQuat(0, 0, 0, 0, fs) for fs in factor_specs]
    per_slot: list[list[LipschitzQuat]] = []
    for fs in factor_specs:
        p, a = fs.factors[0]
        if p == 2:
            h = 2 ** (a - 1)
            per_slot.append([LipschitzQuat(h, h, h, h, fs)])
        else:
            per_slot.append(_odd_prime_dominators(p))
    out = []
    for slot, elems in enumerate(per_slot):
        for z in elems:
            parts = list(zeros)
            parts[slot] = z
            out.append(quat_crt_join(parts, spec))
    return sorted(out, key=lambda z: z.code)


# ---------------------------------------------------------------------------
# open-problem probes


@dataclass
class ProbeReport:
    target: str
    ring: str
    vertex_count: int
    result: DominationResult
    status: str = "empirical (no closed-form value known)"

    def to_dict(self) -> dict:
        r = self.result
        return {
            "target": self.target,
            "ring": self.ring,
            "vertex_count": self.vertex_count,
            "status": self.status,
            "method": r.method,
            "gamma": r.gamma,
            "lo": r.lo,
            "hi": r.hi,
            "certificate": list(r.certificate),
            "explored_nodes": r.explored_nodes,
        }


def probe_open_problems(
    target: str,
    params: Sequence[int],
    node_budget: int = DEFAULT_NODE_BUDGET,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> ProbeReport:
    """Domination number of Z_{p^t}[i,j,k] (``target="pt"``, params (p, t))
    or of M_size(F_q) for prime q (``target="matrix"``, params (size, q))."""
    if target == "pt":
        p, t = params
        ring: QuaternionRing | MatrixRing = QuaternionRing(factorize(p**t))
    elif target == "matrix":
        size, q = params
        if factorize(q).factors != ((q, 1),):
            raise ValueError("only prime fields are supported")
        ring = MatrixRing(size, q)
    else:
        raise ValueError(f"unknown probe target {target!r}")
    g = build_graph(ring)
    res = exact_gamma(g, node_budget=node_budget, max_vertices=max_vertices)
    return ProbeReport(target, ring.name, g.vertex_count, res)
