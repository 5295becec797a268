"""Block decompositions, the crossing-pair block algorithm, and two disjoint paths."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .exposure import ABSENT, PRESENT, ExposureState
from .graph import Graph, VertexSet, add_edges, canonical, iter_bits


class BlockPreconditionError(RuntimeError):
    """The input graph misses a component merge that the exposure already revealed."""


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Blocks (maximal 2-connected pieces, bridges, isolated vertices) of a graph.

    ``blocks`` are sorted vertex tuples in lexicographic order; ``comp[v]`` is
    the component id of ``v`` or ``-1`` for vertices outside the decomposed set.
    """

    blocks: tuple[tuple[int, ...], ...]
    cut_vertices: frozenset[int]
    edge_block: dict[tuple[int, int], int]
    comp: tuple[int, ...]

    @cached_property
    def vertex_blocks(self) -> tuple[tuple[int, ...], ...]:
        per: list[list[int]] = [[] for _ in self.comp]
        for i, b in enumerate(self.blocks):
            for v in b:
                per[v].append(i)
        return tuple(tuple(x) for x in per)

    @property
    def block_cut_edges(self) -> list[tuple[int, int]]:
        """Incidences ``(cut vertex, block index)`` of the block-cutpoint forest."""
        return [(v, i) for v in sorted(self.cut_vertices) for i in self.vertex_blocks[v]]

    def common_block(self, u: int, v: int) -> int | None:
        shared = set(self.vertex_blocks[u]).intersection(self.vertex_blocks[v])
        return min(shared) if shared else None

    def block_set(self, i: int) -> VertexSet:
        return VertexSet.of(self.blocks[i])

    def signature(self) -> tuple[frozenset[frozenset[int]], frozenset[int]]:
        """Order-free summary for comparing decompositions."""
        return frozenset(frozenset(b) for b in self.blocks), self.cut_vertices

    def to_json(self) -> str:
        return json.dumps(
            {
                "blocks": [list(b) for b in self.blocks],
                "cut_vertices": sorted(self.cut_vertices),
                "tree_edges": [list(e) for e in self.block_cut_edges],
            }
        )


def _mask_of(vertices: VertexSet | Iterable[int] | None, n: int) -> int:
    if vertices is None:
        return (1 << n) - 1
    if isinstance(vertices, VertexSet):
        return vertices.bits
    if isinstance(vertices, int):
        return vertices
    return VertexSet.of(vertices).bits


def decompose(h: Graph, vertices: VertexSet | Iterable[int] | None = None) -> BlockDecomposition:
    """Exact block decomposition by an iterative lowpoint search.

    When ``vertices`` is given only the subgraph induced on it is decomposed
    and the remaining vertices get component id ``-1``.
    """
    n = h.n
    allowed = _mask_of(vertices, n)
    nbrs = [list(iter_bits(h.adj[v] & allowed)) if allowed >> v & 1 else [] for v in range(n)]
    disc = [-1] * n
    low = [0] * n
    comp = [-1] * n
    raw_blocks: list[tuple[set[int], list[tuple[int, int]]]] = []
    timer = 0
    ncomp = 0
    for root in iter_bits(allowed):
        if disc[root] >= 0:
            continue
        comp[root] = ncomp
        disc[root] = low[root] = timer
        timer += 1
        if not nbrs[root]:
            raw_blocks.append(({root}, []))
            ncomp += 1
            continue
        edge_stack: list[tuple[int, int]] = []
        stack = [(root, -1, iter(nbrs[root]))]
        while stack:
            u, par, it = stack[-1]
            descended = False
            for w in it:
                if w == par:
                    continue
                if disc[w] < 0:
                    edge_stack.append((u, w))
                    disc[w] = low[w] = timer
                    timer += 1
                    comp[w] = ncomp
                    stack.append((w, u, iter(nbrs[w])))
                    descended = True
                    break
                if disc[w] < disc[u]:
                    if disc[w] < low[u]:
                        low[u] = disc[w]
                    edge_stack.append((u, w))
            if descended:
                continue
            stack.pop()
            if par >= 0:
                if low[u] < low[par]:
                    low[par] = low[u]
                if low[u] >= disc[par]:
                    verts: set[int] = set()
                    edges = []
                    while True:
                        a, b = edge_stack.pop()
                        verts.add(a)
                        verts.add(b)
                        edges.append(canonical(a, b))
                        if (a, b) == (par, u):
                            break
                    raw_blocks.append((verts, edges))
        ncomp += 1
    raw_blocks.sort(key=lambda vb: sorted(vb[0]))
    blocks = tuple(tuple(sorted(vb[0])) for vb in raw_blocks)
    edge_block = {e: i for i, (_, edges) in enumerate(raw_blocks) for e in edges}
    count = [0] * n
    for b in blocks:
        for v in b:
            count[v] += 1
    cut = frozenset(v for v in range(n) if count[v] >= 2)
    return BlockDecomposition(blocks, cut, edge_block, tuple(comp))


def is_crossing(d: BlockDecomposition, u: int, v: int) -> bool:
    """Same component but no common block; pairs that are edges are rejected."""
    if canonical(u, v) in d.edge_block:
        raise ValueError(f"({u}, {v}) is already an edge of the decomposed graph")
    if d.comp[u] < 0 or d.comp[u] != d.comp[v]:
        return False
    return d.common_block(u, v) is None


class BlockStep(NamedTuple):
    u: int
    v: int
    queried: bool
    present: bool
    blocks_after: int


def block_algorithm(
    h: Graph,
    s: ExposureState,
    vertices: VertexSet | Iterable[int] | None = None,
    tag: str = "Q3",
) -> tuple[Graph, BlockDecomposition, list[BlockStep]]:
    """Grow ``h`` by crossing pairs until its blocks match those of the final ``G_p``.

    Host edges that are not absent are scanned in lexicographic order.  A
    crossing pair that is already present is added without a query, an
    untested one is queried; a pair that is not crossing can never become
    crossing later and is dropped.
    """
    n = h.n
    allowed = _mask_of(vertices, n)
    m_graph = h
    d = decompose(m_graph, allowed)
    log: list[BlockStep] = []
    candidates = []
    for u in iter_bits(allowed):
        for v in iter_bits(s.host.adj[u] & allowed & ~((1 << (u + 1)) - 1)):
            if m_graph.has_edge(u, v):
                continue
            st = s.status[s.host.edge_id(u, v)]
            if st == ABSENT:
                continue
            if st == PRESENT and d.comp[u] != d.comp[v]:
                raise BlockPreconditionError(
                    f"present edge ({u}, {v}) joins two components of the input graph"
                )
            candidates.append((u, v))
    for u, v in candidates:
        if m_graph.has_edge(u, v) or not is_crossing(d, u, v):
            continue
        if s.is_present(u, v):
            queried, hit = False, True
        elif s.is_untested(u, v):
            queried, hit = True, s.query(u, v, tag)
        else:
            continue
        if hit:
            before = len(d.blocks)
            m_graph = add_edges(m_graph, [(u, v)])
            d = decompose(m_graph, allowed)
            if len(d.blocks) >= before:
                raise AssertionError("crossing edge did not reduce the block count")
        log.append(BlockStep(u, v, queried, hit, len(d.blocks)))
    return m_graph, d, log


class DisjointPaths(NamedTuple):
    """Two vertex-disjoint A-B paths, each listed from its A end to its B end.

    When ``A`` (or ``B``) is a single vertex both paths share that endpoint.
    """

    first: tuple[int, ...]
    second: tuple[int, ...]


def _trim(path: list[int], A: int, B: int) -> tuple[int, ...]:
    last_a = max(i for i, v in enumerate(path) if A >> v & 1)
    first_b = next(i for i in range(last_a, len(path)) if B >> path[i] & 1)
    return tuple(path[last_a : first_b + 1])


def two_disjoint_paths(
    b: Graph,
    A: VertexSet | Iterable[int],
    B: VertexSet | Iterable[int],
    vertices: VertexSet | Iterable[int] | None = None,
) -> DisjointPaths:
    """Menger paths by unit vertex-capacity max-flow on the split graph.

    ``vertices`` restricts ``b`` to the block's vertex set; that induced
    subgraph must be 2-connected.
    """
    allowed = _mask_of(vertices, b.n)
    a_bits = _mask_of(A, b.n)
    b_bits = _mask_of(B, b.n)
    if not a_bits or not b_bits:
        raise ValueError("both terminal sets must be nonempty")
    if a_bits & b_bits:
        raise ValueError("terminal sets overlap")
    if (a_bits | b_bits) & ~allowed:
        raise ValueError("terminal outside the block")
    d = decompose(b, allowed)
    if len(d.blocks) != 1 or len(d.blocks[0]) < 3:
        raise ValueError("graph is not 2-connected")

    a_single = a_bits.bit_count() == 1
    b_single = b_bits.bit_count() == 1
    src, snk = -1, -2
    cap: dict[object, dict[object, int]] = {}

    def arc(x: object, y: object, c: int) -> None:
        cap.setdefault(x, {})
        cap.setdefault(y, {})
        cap[x][y] = cap[x].get(y, 0) + c
        cap[y].setdefault(x, 0)

    for v in iter_bits(allowed):
        inner = 2 if (a_single and a_bits >> v & 1) or (b_single and b_bits >> v & 1) else 1
        arc(("i", v), ("o", v), inner)
        for w in iter_bits(b.adj[v] & allowed):
            arc(("o", v), ("i", w), 1)
        if a_bits >> v & 1:
            arc(src, ("i", v), inner)
        if b_bits >> v & 1:
            arc(("o", v), snk, inner)

    flow = 0
    while flow < 2:
        prev: dict[object, object] = {src: None}
        queue = deque([src])
        while queue and snk not in prev:
            x = queue.popleft()
            for y, c in cap[x].items():
                if c > 0 and y not in prev:
                    prev[y] = x
                    queue.append(y)
        if snk not in prev:
            break
        y = snk
        while prev[y] is not None:
            x = prev[y]
            cap[x][y] -= 1
            cap[y][x] += 1
            y = x
        flow += 1
    if flow < 2:
        raise ValueError("fewer than two disjoint paths exist")

    # Flow on an arc shows up as residual capacity on its reverse arc, whose
    # original capacity is zero.
    used: dict[int, list[int]] = {}
    for v in iter_bits(allowed):
        for w in iter_bits(b.adj[v] & allowed):
            if cap[("i", w)][("o", v)] > 0:
                used.setdefault(v, []).append(w)
    starts = []
    for v in iter_bits(a_bits):
        starts.extend([v] * cap[("i", v)][src])
    paths = []
    for v in starts:
        path = [v]
        seen = {v}
        while not b_bits >> path[-1] & 1:
            nxt = used.get(path[-1])
            if not nxt:
                raise AssertionError("flow decomposition lost a path")
            w = nxt.pop()
            if w in seen:
                raise AssertionError("flow decomposition met a cycle")
            path.append(w)
            seen.add(w)
        paths.append(_trim(path, a_bits, b_bits))
    if len(paths) != 2:
        raise AssertionError("flow decomposition failed")
    return DisjointPaths(paths[0], paths[1])
