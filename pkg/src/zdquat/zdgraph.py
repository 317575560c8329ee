"""Directed and undirected zero-divisor graphs and their metrics.

Adjacency rows are stored as packed little-endian bit rows of ``uint64``
words.  In explicit mode the whole ``V x V`` bit matrix is materialised;
in implicit mode rows are produced on demand by multiplying ring elements
and kept in a bounded cache.
"""

from __future__ import annotations

import io
import math
from collections import OrderedDict, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceededError
from .oracles import ElementOracle, QuaternionRing
from .ring_core import RingSpec

DEFAULT_MEM_BUDGET = 2**33  # bits
INF = math.inf


def _words(n: int) -> int:
    return max(1, (n + 63) // 64)


def pack_rows(rows: np.ndarray) -> np.ndarray:
    """Pack a boolean ``(k, V)`` matrix into ``(k, ceil(V/64))`` uint64 words."""
    k, v = rows.shape
    packed = np.packbits(rows, axis=1, bitorder="little")
    out = np.zeros((k, _words(v) * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8")


def unpack_rows(bits: np.ndarray, v: int) -> np.ndarray:
    flat = np.ascontiguousarray(bits).view(np.uint8)
    return np.unpackbits(flat, axis=-1, bitorder="little", count=v).astype(bool)


def popcount(bits: np.ndarray) -> int:
    return int(np.bitwise_count(bits).sum())


def _test_bit(row: np.ndarray, j: int) -> bool:
    return bool((int(row[j >> 6]) >> (j & 63)) & 1)


class ExplicitAdjacency:
    def __init__(self, bits: np.ndarray, v: int) -> None:
        self.bits = bits
        self.v = v

    def row(self, i: int) -> np.ndarray:
        return self.bits[i]

    def rows(self, idx: np.ndarray) -> np.ndarray:
        return self.bits[idx]


class ImplicitAdjacency:
    """Rows computed from the ring on demand, with an LRU row cache."""

    def __init__(self, ring: ElementOracle, coords: np.ndarray, directed: bool, cache_rows: int) -> None:
        self.ring = ring
        self.coords = coords
        self.directed = directed
        self.v = len(coords)
        self.cache_rows = cache_rows
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()
        self.products = 0

    def _compute(self, idx: np.ndarray) -> np.ndarray:
        x = self.coords[idx]
        rel = self.ring.zero_products(x, self.coords)
        self.products += rel.size
        if not self.directed:
            rel |= self.ring.zero_products(self.coords, x).T
            self.products += rel.size
        rel[np.arange(len(idx)), idx] = False
        return pack_rows(rel)

    def rows(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        missing = [int(i) for i in idx if int(i) not in self._cache]
        if missing:
            computed = self._compute(np.array(missing, dtype=np.int64))
            for i, r in zip(missing, computed):
                self._cache[i] = r
        out = np.empty((len(idx), _words(self.v)), dtype=np.uint64)
        for k, i in enumerate(idx):
            i = int(i)
            self._cache.move_to_end(i)
            out[k] = self._cache[i]
        while len(self._cache) > self.cache_rows:
            self._cache.popitem(last=False)
        return out

    def row(self, i: int) -> np.ndarray:
        return self.rows(np.array([i]))[0]


@dataclass
class ZdGraph:
    """A zero-divisor graph (or a plain fixture graph when ``ring`` is None)."""

    ring: ElementOracle | None
    directed: bool
    codes: np.ndarray
    adjacency: ExplicitAdjacency | ImplicitAdjacency
    mode: str = "explicit"
    self_annihilating: int = 0
    _index: dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._index = {int(c): i for i, c in enumerate(self.codes)}

    @property
    def vertex_count(self) -> int:
        return len(self.codes)

    @property
    def spec(self) -> RingSpec | None:
        return getattr(self.ring, "spec", None)

    def index(self, code: int) -> int:
        try:
            return self._index[int(code)]
        except KeyError:
            raise ValueError(f"{code} is not a vertex") from None

    def label(self, i: int) -> str:
        code = int(self.codes[i])
        return self.ring.label(code) if self.ring is not None else str(code)

    def row(self, i: int) -> np.ndarray:
        return self.adjacency.row(i)

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(unpack_rows(self.row(i), self.vertex_count))

    def has_edge(self, i: int, j: int) -> bool:
        return _test_bit(self.row(i), j)

    def degree_sum(self) -> int:
        return sum(popcount(self.row(i)) for i in range(self.vertex_count))

    def edge_count(self) -> int:
        total = self.degree_sum()
        return total if self.directed else total // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as index pairs; undirected edges listed once with i < j."""
        out = []
        for i in range(self.vertex_count):
            for j in self.neighbors(i):
                if self.directed or i < j:
                    out.append((i, int(j)))
        return out

    @classmethod
    def from_edges(cls, v: int, edges: Iterable[tuple[int, int]], directed: bool = False) -> ZdGraph:
        """Fixture graph on vertices 0..v-1 (codes equal indices)."""
        rel = np.zeros((v, v), dtype=bool)
        for a, b in edges:
            if a == b:
                continue
            rel[a, b] = True
            if not directed:
                rel[b, a] = True
        return cls(None, directed, np.arange(v, dtype=np.int64), ExplicitAdjacency(pack_rows(rel), v))


def build_graph(
    ring: ElementOracle | RingSpec | int,
    directed: bool = False,
    mode: str = "explicit",
    mem_budget: int = DEFAULT_MEM_BUDGET,
    threads: int = 1,
    chunk: int = 256,
) -> ZdGraph:
    """Build the directed (x -> y iff xy = 0) or undirected zero-divisor graph."""
    if not hasattr(ring, "zero_products"):
        ring = QuaternionRing(ring)  # type: ignore[arg-type]
    codes = ring.vertex_codes()
    v = len(codes)
    if v == 0:
        raise ValueError(f"{ring.name} has no nonzero zero divisors")
    coords = ring.coords(codes)
    if mode == "implicit":
        cache_rows = max(1, mem_budget // (64 * _words(v)))
        adj = ImplicitAdjacency(ring, coords, directed, cache_rows)
        diag = [bool(ring.zero_products(coords[i : i + 1], coords[i : i + 1])[0, 0]) for i in range(v)]
        return ZdGraph(ring, directed, codes, adj, "implicit", int(sum(diag)))
    if mode != "explicit":
        raise ValueError(f"unknown mode {mode!r}")
    need = v * v
    if need > mem_budget:
        raise BudgetExceededError(
            f"explicit adjacency for {ring.name}", need, mem_budget, "use implicit mode"
        )

    starts = list(range(0, v, chunk))

    def block(s: int) -> np.ndarray:
        return ring.zero_products(coords[s : s + chunk], coords)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(block, starts))
    else:
        blocks = [block(s) for s in starts]
    rel = np.concatenate(blocks)
    self_ann = int(np.trace(rel))
    if not directed:
        rel |= rel.T
    np.fill_diagonal(rel, False)
    return ZdGraph(ring, directed, codes, ExplicitAdjacency(pack_rows(rel), v), "explicit", self_ann)


# ---------------------------------------------------------------------------
# distances


def _frontier_expand(g: ZdGraph, members: np.ndarray) -> np.ndarray:
    if len(members) == 0:
        return np.zeros(_words(g.vertex_count), dtype=np.uint64)
    return np.bitwise_or.reduce(g.adjacency.rows(members), axis=0)


def distance(g: ZdGraph, a: int, b: int) -> float:
    """Shortest-path length from vertex code ``a`` to ``b`` (respects direction)."""
    ia, ib = g.index(a), g.index(b)
    if ia == ib:
        raise ValueError("distance needs two distinct vertices")
    v = g.vertex_count
    visited = np.zeros(_words(v), dtype=np.uint64)
    visited[ia >> 6] |= np.uint64(1 << (ia & 63))
    frontier = np.array([ia])
    level = 0
    while len(frontier):
        level += 1
        nxt = _frontier_expand(g, frontier) & ~visited
        if _test_bit(nxt, ib):
            return level
        visited |= nxt
        frontier = np.flatnonzero(unpack_rows(nxt, v))
    return INF


@dataclass
class DiameterResult:
    diameter: float
    witness: tuple[int, ...] | None = None  # vertex codes along a longest shortest path

    def __int__(self) -> int:
        return int(self.diameter)


def _neighbor_lists(g: ZdGraph) -> list[np.ndarray]:
    return [g.neighbors(i) for i in range(g.vertex_count)]


def diameter(g: ZdGraph, with_witness: bool = True) -> DiameterResult:
    """Exact diameter by iterated reach sets.

    ``reach_k(i)`` is the set of vertices within distance k of i; it grows by
    ``reach_{k+1}(i) = reach_k(i) | OR_{j in N(i)} reach_k(j)``, so each round
    costs one row-OR per edge.  Returns infinity for disconnected graphs.
    """
    v = g.vertex_count
    if v <= 1:
        return DiameterResult(0)
    full = pack_rows(np.ones((1, v), dtype=bool))[0]
    nbrs = _neighbor_lists(g)
    reach = np.stack([g.row(i) for i in range(v)])
    for i in range(v):
        reach[i, i >> 6] |= np.uint64(1 << (i & 63))
    levels = [reach]
    k = 1
    while True:
        done = (reach == full).all(axis=1)
        if done.all():
            break
        nxt = reach.copy()
        for i in np.flatnonzero(~done):
            if len(nbrs[i]):
                nxt[i] |= np.bitwise_or.reduce(reach[nbrs[i]], axis=0)
        if np.array_equal(nxt, reach):
            return DiameterResult(INF)
        reach = nxt
        levels.append(reach)
        k += 1
    if not with_witness or k < 2:
        return DiameterResult(k)
    # a pair at distance exactly k: not inside reach_{k-1}
    prev = levels[-2]
    i = int(np.flatnonzero(~(prev == full).all(axis=1))[0])
    j = int(np.flatnonzero(~unpack_rows(prev[i], v))[0])
    path = [i]
    cur = i
    for step in range(k - 1, 0, -1):
        # next hop: a neighbor of cur with j within `step - 1` of it
        target_level = levels[step - 1]
        for nb in nbrs[cur]:
            if _test_bit(target_level[nb], j):
                cur = int(nb)
                break
        path.append(cur)
    path.append(j)
    return DiameterResult(k, tuple(int(g.codes[t]) for t in path))


# ---------------------------------------------------------------------------
# girth


@dataclass
class GirthResult:
    girth: float
    cycle: tuple[int, ...] | None = None  # vertex codes, first vertex not repeated


def _shortest_cycle_undirected(nbrs: list[np.ndarray]) -> tuple[float, list[int] | None]:
    best: float = INF
    best_cycle = None
    v = len(nbrs)
    for s in range(v):
        dist = {s: 0}
        parent = {s: -1}
        q = deque([s])
        while q:
            x = q.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y in nbrs[x]:
                y = int(y)
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    q.append(y)
                elif parent[x] != y:
                    length = dist[x] + dist[y] + 1
                    if length < best:
                        best = length
                        left = [x]
                        while parent[left[-1]] != -1:
                            left.append(parent[left[-1]])
                        right = [y]
                        while parent[right[-1]] != -1:
                            right.append(parent[right[-1]])
                        # s .. x then y .. (child of s)
                        best_cycle = left[::-1] + right[:-1]
    return best, best_cycle


def _shortest_cycle_directed(nbrs: list[np.ndarray]) -> tuple[float, list[int] | None]:
    best: float = INF
    best_cycle = None
    for s in range(len(nbrs)):
        dist = {s: 0}
        parent = {s: -1}
        q = deque([s])
        while q:
            x = q.popleft()
            if dist[x] + 1 >= best:
                break
            for y in nbrs[x]:
                y = int(y)
                if y == s:
                    best = dist[x] + 1
                    cyc = [x]
                    while parent[cyc[-1]] != -1:
                        cyc.append(parent[cyc[-1]])
                    best_cycle = cyc[::-1]
                    break
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    q.append(y)
    return best, best_cycle


def girth(g: ZdGraph) -> GirthResult:
    """Length of a shortest cycle, with one such cycle as witness.

    Short cycles are searched with bit rows first (2-cycles for digraphs,
    triangles for graphs); the BFS fallback handles everything else.
    """
    v = g.vertex_count
    for i in range(v):
        nb = g.neighbors(i)
        if g.directed:
            nb_rows = g.adjacency.rows(nb) if len(nb) else None
            if nb_rows is None:
                continue
            back = (nb_rows[:, i >> 6] >> np.uint64(i & 63)) & np.uint64(1)
            hit = np.flatnonzero(back)
            if len(hit):
                j = int(nb[hit[0]])
                return GirthResult(2, (int(g.codes[i]), int(g.codes[j])))
        else:
            later = nb[nb > i]
            if not len(later):
                continue
            common = g.adjacency.rows(later) & g.row(i)
            hit = np.flatnonzero(common.any(axis=1))
            if len(hit):
                j = int(later[hit[0]])
                k = int(np.flatnonzero(unpack_rows(common[hit[0]], v))[0])
                return GirthResult(3, tuple(int(g.codes[t]) for t in (i, j, k)))
    nbrs = _neighbor_lists(g)
    length, cyc = (_shortest_cycle_directed if g.directed else _shortest_cycle_undirected)(nbrs)
    if cyc is None:
        return GirthResult(INF)
    return GirthResult(length, tuple(int(g.codes[t]) for t in cyc))


# ---------------------------------------------------------------------------
# global shape tests


def is_complete(g: ZdGraph) -> bool:
    v = g.vertex_count
    return g.edge_count() == (v * (v - 1) if g.directed else v * (v - 1) // 2)


def is_complete_bipartite(g: ZdGraph) -> bool:
    if g.directed:
        raise ValueError("complete bipartiteness is defined for undirected graphs")
    v = g.vertex_count
    if v < 2:
        return False
    color = [-1] * v
    color[0] = 0
    q = deque([0])
    seen = 1
    while q:
        x = q.popleft()
        for y in g.neighbors(x):
            y = int(y)
            if color[y] == -1:
                color[y] = 1 - color[x]
                seen += 1
                q.append(y)
            elif color[y] == color[x]:
                return False
    if seen < v:
        return False
    left = color.count(0)
    return g.edge_count() == left * (v - left)


def is_symmetric_digraph(g: ZdGraph) -> bool:
    if not g.directed:
        raise ValueError("symmetry is a property of directed graphs")
    for i in range(g.vertex_count):
        nb = g.neighbors(i)
        if not len(nb):
            continue
        back = (g.adjacency.rows(nb)[:, i >> 6] >> np.uint64(i & 63)) & np.uint64(1)
        if not back.all():
            return False
    return True


def asymmetric_edge(g: ZdGraph) -> tuple[int, int] | None:
    """First directed edge (as codes) whose reverse is missing."""
    for i in range(g.vertex_count):
        nb = g.neighbors(i)
        if not len(nb):
            continue
        back = (g.adjacency.rows(nb)[:, i >> 6] >> np.uint64(i & 63)) & np.uint64(1)
        miss = np.flatnonzero(back == 0)
        if len(miss):
            return int(g.codes[i]), int(g.codes[nb[miss[0]]])
    return None


@dataclass
class GraphMetrics:
    diameter: float
    girth: float
    is_complete: bool
    is_complete_bipartite: bool | None
    is_symmetric_digraph: bool | None
    diameter_witness: tuple[int, ...] | None = None
    girth_witness: tuple[int, ...] | None = None


def metrics(g: ZdGraph) -> GraphMetrics:
    d = diameter(g)
    gi = girth(g)
    return GraphMetrics(
        diameter=d.diameter,
        girth=gi.girth,
        is_complete=is_complete(g),
        is_complete_bipartite=None if g.directed else is_complete_bipartite(g),
        is_symmetric_digraph=is_symmetric_digraph(g) if g.directed else None,
        diameter_witness=d.witness,
        girth_witness=gi.cycle,
    )


# ---------------------------------------------------------------------------
# export


def _edge_codes(g: ZdGraph) -> list[tuple[int, int]]:
    out = []
    for i, j in g.edges():
        a, b = int(g.codes[i]), int(g.codes[j])
        if not g.directed and a > b:
            a, b = b, a
        out.append((a, b))
    return sorted(out)


def export(g: ZdGraph, fmt: str = "edge-list") -> bytes:
    """Serialize as ``dot`` or ``edge-list``; output is byte-reproducible."""
    buf = io.StringIO()
    if fmt == "edge-list":
        for a, b in _edge_codes(g):
            buf.write(f"{a} {b}\n")
    elif fmt == "dot":
        kind, arrow = ("digraph", "->") if g.directed else ("graph", "--")
        name = g.ring.name if g.ring is not None else "G"
        buf.write(f'{kind} "{name}" {{\n')
        for i in range(g.vertex_count):
            buf.write(f'  {int(g.codes[i])} [label="{g.label(i)}"];\n')
        for a, b in _edge_codes(g):
            buf.write(f"  {a} {arrow} {b};\n")
        buf.write("}\n")
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    return buf.getvalue().encode("utf-8")


def write_export(g: ZdGraph, path: str | Path, fmt: str = "edge-list") -> None:
    data = export(g, fmt)
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write {fmt} export to {path}: {exc}") from exc


def codes_of(g: ZdGraph, idx: Sequence[int]) -> list[int]:
    return [int(g.codes[i]) for i in idx]
