"""Depth-first exploration of a partially exposed random subgraph.

The search only ever follows present edges, querying untested ones when the
vertex on top of the stack looks for an unvisited neighbor.  The resulting
rooted forest certifies the component structure: every edge that was not
tested absent joins two vertices on a common root-to-leaf path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .exposure import UNTESTED, ExposureState
from .graph import VertexSet, iter_bits

QueryLog = list[tuple[int, int, bool]]


@dataclass(frozen=True, eq=False)
class Forest:
    """Rooted spanning forest with constant-time ancestor tests.

    ``pre[v]`` is the discovery index of ``v`` and ``post[v]`` the largest
    discovery index inside the subtree of ``v``, so ``u`` is an ancestor of
    ``v`` exactly when ``pre[u] <= pre[v] <= post[u]``.  Vertices outside the
    explored set have ``comp == -1``.
    """

    parent: tuple[int, ...]
    depth: tuple[int, ...]
    pre: tuple[int, ...]
    post: tuple[int, ...]
    comp: tuple[int, ...]
    order: tuple[int, ...]

    @classmethod
    def from_parents(cls, parent: Sequence[int], members: Iterable[int] | None = None) -> Forest:
        """Build a forest from parent links (``-1`` marks a root).

        Children are visited in ascending id order, roots likewise.
        """
        n = len(parent)
        inside = set(range(n)) if members is None else set(members)
        children: list[list[int]] = [[] for _ in range(n)]
        roots = []
        for v in sorted(inside):
            p = parent[v]
            if p < 0:
                roots.append(v)
            else:
                if p not in inside:
                    raise ValueError(f"parent {p} of {v} is not a member")
                children[p].append(v)
        depth = [0] * n
        pre = [-1] * n
        post = [-1] * n
        comp = [-1] * n
        order: list[int] = []
        for c, r in enumerate(roots):
            stack = [(r, 0)]
            pre[r] = len(order)
            order.append(r)
            comp[r] = c
            while stack:
                v, i = stack[-1]
                if i < len(children[v]):
                    stack[-1] = (v, i + 1)
                    w = children[v][i]
                    if pre[w] >= 0:
                        raise ValueError("parent links contain a cycle")
                    depth[w] = depth[v] + 1
                    pre[w] = len(order)
                    order.append(w)
                    comp[w] = c
                    stack.append((w, 0))
                else:
                    post[v] = len(order) - 1
                    stack.pop()
        if len(order) != len(inside):
            raise ValueError("parent links contain a cycle")
        par = tuple(parent[v] if v in inside else -1 for v in range(n))
        return cls(par, tuple(depth), tuple(pre), tuple(post), tuple(comp), tuple(order))

    @classmethod
    def path(cls, vertices: Sequence[int], n: int | None = None) -> Forest:
        """A single chain ``vertices[0] -> vertices[1] -> ...``."""
        size = n if n is not None else max(vertices) + 1
        parent = [-1] * size
        for a, b in zip(vertices, vertices[1:]):
            parent[b] = a
        return cls.from_parents(parent, members=vertices)

    @property
    def n(self) -> int:
        return len(self.parent)

    @cached_property
    def members(self) -> VertexSet:
        return VertexSet.of(self.order)

    @cached_property
    def roots(self) -> tuple[int, ...]:
        return tuple(v for v in self.order if self.parent[v] < 0)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in range(self.n)]
        for v in self.order:
            if self.parent[v] >= 0:
                kids[self.parent[v]].append(v)
        return tuple(tuple(k) for k in kids)

    def tree_edges(self) -> list[tuple[int, int]]:
        return sorted((min(v, p), max(v, p)) for v, p in enumerate(self.parent) if p >= 0)

    def is_ancestor(self, u: int, v: int) -> bool:
        """``u <=_T v``: ``u`` lies on the path from ``v`` to its root."""
        pu = self.pre[u]
        return pu >= 0 and self.pre[v] >= 0 and pu <= self.pre[v] <= self.post[u]

    def comparable(self, u: int, v: int) -> bool:
        return self.is_ancestor(u, v) or self.is_ancestor(v, u)

    @cached_property
    def _up(self) -> list[list[int]]:
        n = self.n
        levels = max(1, max(self.depth, default=0).bit_length())
        up = [[p if p >= 0 else v for v, p in enumerate(self.parent)]]
        for _ in range(1, levels):
            prev = up[-1]
            up.append([prev[prev[v]] for v in range(n)])
        return up

    def ancestor_at_depth(self, v: int, d: int) -> int:
        diff = self.depth[v] - d
        if diff < 0:
            raise ValueError("requested depth is below the vertex")
        j = 0
        while diff:
            if diff & 1:
                v = self._up[j][v]
            diff >>= 1
            j += 1
        return v

    def lca(self, u: int, v: int) -> int:
        if self.comp[u] < 0 or self.comp[u] != self.comp[v]:
            raise ValueError(f"{u} and {v} lie in different trees")
        if self.is_ancestor(u, v):
            return u
        if self.is_ancestor(v, u):
            return v
        for j in range(len(self._up) - 1, -1, -1):
            a = self._up[j][u]
            if not self.is_ancestor(a, v):
                u = a
        return self.parent[u]

    def tree_distance(self, u: int, v: int) -> int:
        if self.comp[u] < 0 or self.comp[u] != self.comp[v]:
            raise ValueError(f"{u} and {v} lie in different trees")
        if self.is_ancestor(u, v) or self.is_ancestor(v, u):
            return abs(self.depth[u] - self.depth[v])
        return self.depth[u] + self.depth[v] - 2 * self.depth[self.lca(u, v)]

    def tree_path(self, u: int, v: int) -> list[int]:
        """Vertices of the tree path from ``u`` to ``v``, both included."""
        a = self.lca(u, v)
        left = [u]
        while left[-1] != a:
            left.append(self.parent[left[-1]])
        right = [v]
        while right[-1] != a:
            right.append(self.parent[right[-1]])
        return left + right[-2::-1]

    def descendants(self, v: int) -> list[int]:
        return list(self.order[self.pre[v] : self.post[v] + 1])

    def dump(self) -> str:
        lines = [
            f"{v} {self.parent[v]} {self.depth[v]} {self.comp[v]}\n"
            for v in range(self.n)
            if self.comp[v] >= 0
        ]
        return "".join(lines)


@dataclass(frozen=True)
class DfsPriority:
    """Vertex order for root choice and neighbor scans, plus clique cycles to walk.

    ``order`` lists every vertex once; ``None`` means ascending id.  Each entry
    of ``cycles`` is a Hamilton cycle (as a vertex sequence) of a prepared
    clique whose edges are all present.
    """

    order: tuple[int, ...] | None = None
    cycles: tuple[tuple[int, ...], ...] = field(default_factory=tuple)

    def with_cycles(self, cycles: Iterable[Sequence[int]]) -> DfsPriority:
        return DfsPriority(self.order, tuple(tuple(c) for c in cycles))


def dfs_explore(
    s: ExposureState,
    prio: DfsPriority | None = None,
    vertices: VertexSet | Iterable[int] | None = None,
    tag: str = "Q2",
) -> tuple[Forest, QueryLog]:
    """Explore ``G_p`` restricted to ``vertices`` (all host vertices by default)."""
    prio = prio or DfsPriority()
    host = s.host
    n = host.n
    if vertices is None:
        allowed = (1 << n) - 1
    elif isinstance(vertices, VertexSet):
        allowed = vertices.bits
    else:
        allowed = VertexSet.of(vertices).bits

    if prio.order is None:
        scan = range(n)
        rank = None
    else:
        if sorted(prio.order) != list(range(n)):
            raise ValueError("priority order must list every vertex exactly once")
        scan = prio.order
        rank = [0] * n
        for i, v in enumerate(prio.order):
            rank[v] = i

    clique_of: dict[int, int] = {}
    for ci, cyc in enumerate(prio.cycles):
        if len(set(cyc)) != len(cyc):
            raise ValueError("clique cycle repeats a vertex")
        for i, v in enumerate(cyc):
            if not allowed >> v & 1:
                raise ValueError(f"clique vertex {v} is outside the explored set")
            if v in clique_of:
                raise ValueError(f"vertex {v} appears in two clique cycles")
            clique_of[v] = ci
            w = cyc[(i + 1) % len(cyc)]
            if len(cyc) > 1 and not s.is_present(v, w):
                raise ValueError(f"claimed Hamilton cycle edge ({v}, {w}) is not present")

    parent = [-1] * n
    depth = [0] * n
    pre = [-1] * n
    post = [-1] * n
    comp = [-1] * n
    order: list[int] = []
    cand = [0] * n
    entered = [False] * len(prio.cycles)
    stack: list[int] = []
    active = allowed
    log: QueryLog = []
    present = s.present_adj
    untested = s.untested_adj

    def discover(v: int, par: int, c: int) -> None:
        nonlocal active
        parent[v] = par
        depth[v] = depth[par] + 1 if par >= 0 else 0
        pre[v] = len(order)
        order.append(v)
        comp[v] = c
        active &= ~(1 << v)
        cand[v] = host.adj[v] & allowed
        stack.append(v)

    def walk(v: int, c: int) -> None:
        ci = clique_of.get(v)
        if ci is None or entered[ci]:
            return
        entered[ci] = True
        cyc = prio.cycles[ci]
        size = len(cyc)
        if size < 2:
            return
        i = cyc.index(v)
        step = 1 if cyc[(i + 1) % size] < cyc[(i - 1) % size] else -1
        prev = v
        for j in range(1, size):
            w = cyc[(i + step * j) % size]
            if not active >> w & 1:
                raise ValueError(f"clique vertex {w} visited before its clique was entered")
            discover(w, prev, c)
            prev = w

    ncomp = 0
    for root in scan:
        if not active >> root & 1:
            continue
        c = ncomp
        ncomp += 1
        discover(root, -1, c)
        walk(root, c)
        while stack:
            u = stack[-1]
            cu = cand[u] & active
            found = -1
            while cu:
                if rank is None:
                    w = (cu & -cu).bit_length() - 1
                else:
                    w = min(iter_bits(cu), key=rank.__getitem__)
                if present[u] >> w & 1:
                    found = w
                    break
                if untested[u] >> w & 1:
                    hit = s.query(u, w, tag)
                    log.append((u, w, hit))
                    if hit:
                        found = w
                        break
                cu &= ~(1 << w)
            cand[u] = cu
            if found < 0:
                post[u] = len(order) - 1
                stack.pop()
            else:
                discover(found, u, c)
                walk(found, c)

    forest = Forest(tuple(parent), tuple(depth), tuple(pre), tuple(post), tuple(comp), tuple(order))
    return forest, log


def dfs_clique_walk(
    s: ExposureState,
    cycles: Iterable[Sequence[int]],
    prio: DfsPriority | None = None,
    vertices: VertexSet | Iterable[int] | None = None,
    tag: str = "Q2",
) -> tuple[Forest, QueryLog]:
    """DFS that walks each prepared clique's Hamilton cycle on first entry."""
    base = prio or DfsPriority()
    return dfs_explore(s, base.with_cycles(cycles), vertices=vertices, tag=tag)


def far_pairs(T: Forest, s: ExposureState, k: int) -> list[tuple[int, int]]:
    """Untested host edges inside one tree whose tree distance is at least ``k + 1``.

    Pairs come back as ``(u, v)`` with ``u < v`` in lexicographic order.
    """
    ea = s.host.edge_array
    if ea.size == 0:
        return []
    eids = np.flatnonzero(s.status == UNTESTED)
    if eids.size == 0:
        return []
    us, vs = ea[eids, 0], ea[eids, 1]
    comp = np.asarray(T.comp)
    keep = (comp[us] >= 0) & (comp[us] == comp[vs])
    us, vs = us[keep], vs[keep]
    pre = np.asarray(T.pre)
    post = np.asarray(T.post)
    depth = np.asarray(T.depth)
    anc = ((pre[us] <= pre[vs]) & (pre[vs] <= post[us])) | (
        (pre[vs] <= pre[us]) & (pre[us] <= post[vs])
    )
    dist = np.abs(depth[us] - depth[vs])
    out = []
    for u, v, a, d in zip(us.tolist(), vs.tolist(), anc.tolist(), dist.tolist()):
        if not a:
            d = T.tree_distance(u, v)
        if d >= k + 1:
            out.append((u, v))
    return out
