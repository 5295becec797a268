"""Immutable simple graphs backed by per-vertex neighbor bitsets."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

Edge = tuple[int, int]


def iter_bits(x: int) -> Iterator[int]:
    """Yield the positions of set bits of ``x`` in ascending order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def canonical(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class VertexSet:
    """A set of vertex ids stored as an integer bitmask."""

    bits: int = 0

    @classmethod
    def of(cls, vertices: Iterable[int]) -> VertexSet:
        return cls(bits_of(vertices))

    @classmethod
    def full(cls, n: int) -> VertexSet:
        return cls((1 << n) - 1)

    def __contains__(self, v: object) -> bool:
        return isinstance(v, (int, np.integer)) and v >= 0 and bool(self.bits >> int(v) & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __or__(self, other: VertexSet) -> VertexSet:
        return VertexSet(self.bits | other.bits)

    def __and__(self, other: VertexSet) -> VertexSet:
        return VertexSet(self.bits & other.bits)

    def __sub__(self, other: VertexSet) -> VertexSet:
        return VertexSet(self.bits & ~other.bits)

    def __xor__(self, other: VertexSet) -> VertexSet:
        return VertexSet(self.bits ^ other.bits)

    def __le__(self, other: VertexSet) -> bool:
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: VertexSet) -> bool:
        return self.bits & other.bits == 0

    def min(self) -> int:
        if not self.bits:
            raise ValueError("empty vertex set")
        return (self.bits & -self.bits).bit_length() - 1

    def to_list(self) -> list[int]:
        return list(iter_bits(self.bits))

    def __repr__(self) -> str:
        return f"VertexSet({self.to_list()})"


def _as_bits(X: VertexSet | Iterable[int] | int) -> int:
    if isinstance(X, VertexSet):
        return X.bits
    if isinstance(X, int):
        return X
    return bits_of(X)


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``labels`` is set on graphs produced by :func:`induced` and maps each new
    vertex id to the id it had in the parent graph.
    """

    n: int
    adj: tuple[int, ...]
    labels: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.adj) != self.n:
            raise ValueError("adjacency length does not match n")

    # construction

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        adj = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    # basic queries

    @cached_property
    def m(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    @property
    def vertices(self) -> VertexSet:
        return VertexSet.full(self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(iter_bits(self.adj[v]))

    def neighbor_set(self, v: int) -> VertexSet:
        return VertexSet(self.adj[v])

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(a.bit_count() for a in self.adj)

    def min_degree(self) -> int:
        return min(self.degrees, default=0)

    def edges(self) -> list[Edge]:
        """All edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        out = []
        for u in range(self.n):
            out.extend((u, v) for v in iter_bits(self.adj[u] >> (u + 1) << (u + 1)))
        return out

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` int64 array; row ``i`` is edge id ``i``."""
        arr = np.array(self.edges(), dtype=np.int64)
        return arr.reshape(-1, 2)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges())}

    def edge_id(self, u: int, v: int) -> int:
        try:
            return self.edge_index[canonical(u, v)]
        except KeyError:
            raise KeyError(f"({u}, {v}) is not an edge") from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    def original(self, v: int) -> int:
        """Vertex id in the parent graph (identity when not induced)."""
        return v if self.labels is None else self.labels[v]


def neighborhood(g: Graph, X: VertexSet | Iterable[int]) -> VertexSet:
    """Vertices outside ``X`` with at least one neighbor in ``X``."""
    xb = _as_bits(X)
    acc = 0
    for v in iter_bits(xb):
        acc |= g.adj[v]
    return VertexSet(acc & ~xb)


def edge_count(g: Graph, X: VertexSet | Iterable[int]) -> int:
    """Number of edges with both endpoints in ``X``."""
    xb = _as_bits(X)
    return sum((g.adj[v] & xb).bit_count() for v in iter_bits(xb)) // 2


def edge_count_between(g: Graph, X: VertexSet | Iterable[int], Y: VertexSet | Iterable[int]) -> int:
    xb, yb = _as_bits(X), _as_bits(Y)
    if xb & yb:
        raise ValueError("vertex sets overlap")
    return sum((g.adj[v] & yb).bit_count() for v in iter_bits(xb))


def induced(g: Graph, X: VertexSet | Iterable[int]) -> Graph:
    """Subgraph induced on ``X``, relabeled to ``0..|X|-1`` in ascending order."""
    old = list(iter_bits(_as_bits(X)))
    new_of = {v: i for i, v in enumerate(old)}
    adj = []
    xb = _as_bits(X)
    for v in old:
        row = 0
        for w in iter_bits(g.adj[v] & xb):
            row |= 1 << new_of[w]
        adj.append(row)
    base = g.labels
    labels = tuple(old) if base is None else tuple(base[v] for v in old)
    return Graph(len(old), tuple(adj), labels)


def remove_vertices(g: Graph, X: VertexSet | Iterable[int]) -> Graph:
    """``G - X`` as an induced subgraph on the remaining vertices."""
    return induced(g, ((1 << g.n) - 1) & ~_as_bits(X))


def restrict(g: Graph, X: VertexSet | Iterable[int]) -> Graph:
    """Keep only the edges inside ``X`` without relabeling vertices."""
    xb = _as_bits(X)
    return Graph(g.n, tuple((a & xb) if (xb >> v) & 1 else 0 for v, a in enumerate(g.adj)))


def add_edges(g: Graph, edges: Iterable[Sequence[int]]) -> Graph:
    adj = list(g.adj)
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < g.n and 0 <= v < g.n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={g.n}")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return Graph(g.n, tuple(adj), g.labels)


def union(g1: Graph, g2: Graph) -> Graph:
    if g1.n != g2.n:
        raise ValueError("graphs have different vertex counts")
    return Graph(g1.n, tuple(a | b for a, b in zip(g1.adj, g2.adj)))


def intersection(g1: Graph, g2: Graph) -> Graph:
    if g1.n != g2.n:
        raise ValueError("graphs have different vertex counts")
    return Graph(g1.n, tuple(a & b for a, b in zip(g1.adj, g2.adj)))


def components(g: Graph, within: VertexSet | Iterable[int] | None = None) -> list[VertexSet]:
    """Connected components, ordered by smallest vertex."""
    remaining = (1 << g.n) - 1 if within is None else _as_bits(within)
    comps = []
    while remaining:
        low = remaining & -remaining
        comp = frontier = low
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= g.adj[v]
            nxt &= remaining & ~comp
            comp |= nxt
            frontier = nxt
        comps.append(VertexSet(comp))
        remaining &= ~comp
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(components(g)) == 1


# edge-list text format


def write_edge_list(g: Graph, dest: str | Path | IO[str]) -> None:
    lines = [f"{g.n} {g.m}\n"] + [f"{u} {v}\n" for u, v in g.edges()]
    if isinstance(dest, (str, Path)):
        Path(dest).write_text("".join(lines), encoding="ascii")
    else:
        dest.writelines(lines)


def format_edge_list(g: Graph) -> str:
    return "".join([f"{g.n} {g.m}\n"] + [f"{u} {v}\n" for u, v in g.edges()])


def parse_edge_list(text: str) -> Graph:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError("edge list must start with a line 'n m'")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"header declares {m} edges, found {len(body)}")
    edges = []
    for row in body:
        if len(row) != 2:
            raise ValueError(f"malformed edge line: {' '.join(row)}")
        u, v = int(row[0]), int(row[1])
        if not 0 <= u < v < n:
            raise ValueError(f"edge ({u}, {v}) violates 0 <= u < v < n")
        edges.append((u, v))
    g = Graph.from_edges(n, edges)
    if g.m != m:
        raise ValueError("edge list contains duplicate edges")
    return g


def read_edge_list(src: str | Path | IO[str]) -> Graph:
    if isinstance(src, (str, Path)):
        return parse_edge_list(Path(src).read_text(encoding="ascii"))
    return parse_edge_list(src.read())
