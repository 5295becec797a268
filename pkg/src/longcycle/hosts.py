"""Host-graph families used by the harness."""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from pathlib import Path

import networkx as nx

from .graph import Graph, read_edge_list

FAMILIES = ("complete", "complete-bipartite", "random-regular", "barbell", "cycle-power", "file", "avg-degree")


@dataclass(frozen=True)
class HostSpec:
    """Parameters of a host family; unused fields are ignored.

    ``k`` is the declared minimum degree.  When left as ``None`` it is
    derived from the family (for example ``n - 1`` for complete graphs).
    """

    family: str
    n: int | None = None
    k: int | None = None
    r: int | None = None
    a: int | None = None
    b: int | None = None
    bridges: int = 0
    avg: float | None = None
    path: str | None = None
    seed: int = 0

    def declared_k(self) -> int | None:
        if self.k is not None:
            return self.k
        if self.family == "complete" and self.n is not None:
            return self.n - 1
        if self.family == "complete-bipartite" and self.a is not None and self.b is not None:
            return min(self.a, self.b)
        if self.family == "cycle-power" and self.r is not None:
            return 2 * self.r
        return None


def complete(n: int) -> Graph:
    return Graph.complete(n)


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def cycle_power(n: int, r: int) -> Graph:
    if not 1 <= r or 2 * r >= n:
        raise ValueError("cycle power needs 1 <= r and 2r < n")
    return Graph.from_edges(n, {tuple(sorted((i, (i + d) % n))) for i in range(n) for d in range(1, r + 1)})


def barbell(k: int, bridges: int = 0) -> Graph:
    """Two copies of ``K_{k+1}``: sharing one vertex, or joined by ``bridges`` disjoint edges."""
    if k < 1:
        raise ValueError("k must be positive")
    size = k + 1
    if bridges == 0:
        n = 2 * size - 1
        second = range(k, n)
    else:
        if bridges > size:
            raise ValueError("more bridges than clique vertices")
        n = 2 * size
        second = range(size, n)
    edges = [(i, j) for i in range(size) for j in range(i + 1, size)]
    sec = list(second)
    edges += [(sec[i], sec[j]) for i in range(len(sec)) for j in range(i + 1, len(sec))]
    edges += [(i, size + i) for i in range(bridges)]
    return Graph.from_edges(n, edges)


def random_regular(n: int, k: int, rng: random.Random) -> Graph:
    """Random simple ``k``-regular graph.

    Stubs are paired one pair at a time and a pair forming a loop or a repeated
    edge is redrawn (networkx's pairing generator), which stays fast where
    rejecting whole pairings almost never succeeds.
    """
    if n * k % 2 or k >= n or k < 0:
        raise ValueError(f"no simple {k}-regular graph on {n} vertices")
    if n - 1 - k < k:
        # complementing is a bijection, so the dense case reduces to a sparse one
        sparse = random_regular(n, n - 1 - k, rng)
        full = (1 << n) - 1
        return Graph(n, tuple(full & ~sparse.adj[v] & ~(1 << v) for v in range(n)))
    h = nx.random_regular_graph(k, n, seed=rng.randrange(1 << 32))
    return Graph.from_edges(n, h.edges())


def avg_degree(n: int, k: int, avg: float, rng: random.Random) -> Graph:
    """A ``k``-regular core plus uniformly random extra edges up to average degree ``avg``."""
    g = random_regular(n, k, rng)
    target = round(avg * n / 2)
    edges = set(g.edges())
    if target > n * (n - 1) // 2:
        raise ValueError("average degree too large")
    while len(edges) < target:
        u, v = rng.sample(range(n), 2)
        edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges)


def _need(value, name: str, family: str):
    if value is None:
        raise ValueError(f"family {family} needs --{name}")
    return value


def generate_host(spec: HostSpec) -> Graph:
    """Build the host and check its minimum degree against the declared ``k``."""
    fam = spec.family
    rng = random.Random(spec.seed)
    if fam == "complete":
        g = complete(_need(spec.n, "n", fam))
    elif fam == "complete-bipartite":
        g = complete_bipartite(_need(spec.a, "a", fam), _need(spec.b, "b", fam))
    elif fam == "random-regular":
        g = random_regular(_need(spec.n, "n", fam), _need(spec.k, "k", fam), rng)
    elif fam == "barbell":
        g = barbell(_need(spec.k, "k", fam), spec.bridges)
    elif fam == "cycle-power":
        g = cycle_power(_need(spec.n, "n", fam), _need(spec.r, "r", fam))
    elif fam == "avg-degree":
        g = avg_degree(_need(spec.n, "n", fam), _need(spec.k, "k", fam), _need(spec.avg, "avg", fam), rng)
    elif fam == "file":
        g = read_edge_list(Path(_need(spec.path, "host", fam)))
    else:
        raise ValueError(f"unknown host family {fam!r}")
    k = spec.declared_k()
    if k is not None and g.min_degree() < k:
        raise ValueError(f"generated host has minimum degree {g.min_degree()} < declared k={k}")
    return g


def with_k(spec: HostSpec, g: Graph) -> HostSpec:
    """Fill in ``k`` from the generated graph when the family did not fix it."""
    return spec if spec.declared_k() is not None else replace(spec, k=g.min_degree())
