"""Rotating cycles, long paths inside cycles, and the four block-level merges.

A rotating cycle is a vertical tree path ``chain`` (top first, pivot last)
closed by the present edge ``top``-``pivot``.  Every merge returns a
:class:`CycleCertificate` whose ``bound`` is the length guarantee of the
construction route actually taken; the certificate length never falls below it.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .blocks import two_disjoint_paths
from .dfs import Forest
from .exposure import ExposureState
from .graph import Graph, VertexSet, canonical, iter_bits


@dataclass(frozen=True)
class CycleCertificate:
    cycle: tuple[int, ...]
    provenance: tuple[str, ...] = ()
    bound: float = 0.0

    def __len__(self) -> int:
        return len(self.cycle)

    def problems(self, s: ExposureState, k: int | None = None) -> list[str]:
        out = []
        c = self.cycle
        if len(c) < 3:
            out.append("fewer than 3 vertices")
        if len(set(c)) != len(c):
            out.append("repeated vertex")
        for a, b in zip(c, c[1:] + c[:1]):
            if a == b or not s.host.has_edge(a, b) or not s.is_present(a, b):
                out.append(f"edge ({a}, {b}) not present")
                break
        if len(c) < self.bound - 1e-9:
            out.append(f"length {len(c)} below claimed bound {self.bound:.3f}")
        if k is not None and len(c) < k + 1:
            out.append(f"length {len(c)} below k+1={k + 1}")
        return out

    def verify(self, s: ExposureState, k: int | None = None) -> bool:
        return not self.problems(s, k)

    def as_dict(self) -> dict:
        return {"cycle": list(self.cycle), "provenance": list(self.provenance), "bound": self.bound}

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


@dataclass(frozen=True)
class RotatingCycle:
    """Tree path ``chain`` (ancestor first) plus the closing edge to its deepest vertex."""

    chain: tuple[int, ...]

    @property
    def top(self) -> int:
        return self.chain[0]

    @property
    def pivot(self) -> int:
        return self.chain[-1]

    @property
    def cycle(self) -> tuple[int, ...]:
        return self.chain

    @property
    def closing_edge(self) -> tuple[int, int]:
        return canonical(self.top, self.pivot)

    @cached_property
    def vertex_set(self) -> VertexSet:
        return VertexSet.of(self.chain)

    def __len__(self) -> int:
        return len(self.chain)

    def violations(self, s: ExposureState, T: Forest, k: int, eps: float) -> list[str]:
        out = []
        size = len(self.chain)
        if size < 3 or len(set(self.chain)) != size:
            out.append("not a cycle")
            return out
        if not (1 - 4 * eps) * k <= size <= k:
            out.append("size")
        tree_ok = all(T.parent[b] == a for a, b in zip(self.chain, self.chain[1:]))
        if not tree_ok or not s.is_present(self.top, self.pivot):
            out.append("tree-path")
        untested = (s.untested_adj[self.pivot] & self.vertex_set.bits).bit_count()
        if untested < (1 - 4 * eps) * k:
            out.append("pivot-degree")
        return out

    def check(self, s: ExposureState, T: Forest, k: int, eps: float) -> bool:
        return not self.violations(s, T, k, eps)


# helpers


def _arcs(cycle: Sequence[int], x: int, y: int) -> tuple[list[int], list[int]]:
    """The two arcs from ``x`` to ``y`` (both ends included), forward then backward."""
    size = len(cycle)
    pos = {v: i for i, v in enumerate(cycle)}
    i, j = pos[x], pos[y]
    fwd = [cycle[(i + t) % size] for t in range((j - i) % size + 1)]
    bwd = [cycle[(i - t) % size] for t in range((i - j) % size + 1)]
    return fwd, bwd


def longer_arc(cycle: Sequence[int], x: int, y: int) -> list[int]:
    fwd, bwd = _arcs(cycle, x, y)
    if len(fwd) != len(bwd):
        return fwd if len(fwd) > len(bwd) else bwd
    return min(fwd, bwd)


def _claim(formula: float, fallback: float, actual: int) -> float:
    """The formula when the route attained it, else the route's weaker guarantee."""
    return formula if actual >= formula - 1e-9 else min(fallback, actual)


def _present_graph(s: ExposureState) -> Graph:
    return Graph(s.host.n, tuple(s.present_adj))


def _as_bits(X: VertexSet | Iterable[int]) -> int:
    return X.bits if isinstance(X, VertexSet) else VertexSet.of(X).bits


def _certify(s: ExposureState, cycle: list[int], provenance: Sequence[str], bound: float) -> CycleCertificate:
    cert = CycleCertificate(tuple(cycle), tuple(provenance), float(bound))
    problems = cert.problems(s)
    if problems:
        raise AssertionError(f"merge produced an invalid cycle: {problems}")
    return cert


# rotating cycles


def build_rotating_cycle(
    s: ExposureState,
    T: Forest,
    block: VertexSet | Iterable[int],
    v: int,
    k: int,
    eps: float,
    tag: str = "Q4",
) -> RotatingCycle | CycleCertificate | None:
    """Close a cycle at the full vertex ``v`` by querying its farthest ancestor edges.

    Up to ``ceil(eps*k)`` untested edges from ``v`` to ancestors inside the
    block are queried, farthest first.  The first success gives the tree path
    plus that edge; a cycle that already has ``k+1`` vertices is returned as a
    certificate.  ``None`` means every query failed or the cycle broke a
    rotating-cycle property.
    """
    bbits = _as_bits(block)
    if not bbits >> v & 1:
        raise ValueError(f"{v} is not in the block")
    X = s.untested_adj[v] & bbits
    if X.bit_count() < (1 - eps) * k:
        raise ValueError(f"{v} is not full in the block")
    ancestors, below = [], 0
    for u in iter_bits(X):
        if T.is_ancestor(u, v):
            ancestors.append(u)
        elif T.is_ancestor(v, u):
            below += 1
        else:
            raise ValueError(f"untested edge ({v}, {u}) joins incomparable vertices")
        if T.tree_distance(u, v) > k:
            raise ValueError(f"untested edge ({v}, {u}) spans more than k tree steps")
    if below > eps * k:
        raise ValueError(f"{v} has more than eps*k untested edges to descendants")
    ancestors.sort(key=lambda u: (T.depth[u], u))
    for u in ancestors[: math.ceil(eps * k)]:
        if s.query(v, u, tag):
            chain = tuple(T.tree_path(u, v))
            if len(chain) >= k + 1:
                return _certify(s, list(chain), ("rotating-closure",), k + 1)
            J = RotatingCycle(chain)
            return J if J.check(s, T, k, eps) else None
    return None


def rotate_path_in_cycle(
    s: ExposureState,
    J: RotatingCycle,
    x: int,
    y: int,
    k: int,
    eps: float,
    tag: str = "Q4",
) -> list[int] | None:
    """A long ``x``-``y`` path inside ``V(J)`` using at most ``ceil(eps*k)`` pivot queries.

    Returns the longer arc outright when it reaches ``(2-10eps)k/3``.
    Otherwise, with ``P1`` the arc through the pivot ``u`` oriented so that
    ``u`` is nearer ``y``, it looks along the other arc from ``x`` for a vertex
    ``w`` adjacent to ``u`` and returns ``x..u, w..y``.
    """
    if x == y:
        raise ValueError("endpoints must differ")
    if J.pivot in (x, y):
        raise ValueError("endpoints must avoid the pivot")
    if x not in J.vertex_set or y not in J.vertex_set:
        raise ValueError("endpoints must lie on the cycle")
    target = (2 - 10 * eps) * k / 3
    best = longer_arc(J.chain, x, y)
    if len(best) - 1 >= target:
        return best
    u = J.pivot
    fwd, bwd = _arcs(J.chain, x, y)
    p1, p2 = (fwd, bwd) if u in fwd else (bwd, fwd)
    iu = p1.index(u)
    flipped = len(p1) - 1 - iu > iu
    if flipped:
        x, y = y, x
        p1, p2 = p1[::-1], p2[::-1]
        iu = p1.index(u)
    budget = math.ceil(eps * k)
    for j, w in enumerate(p2[1:], start=1):
        if s.is_present(u, w):
            hit = True
        elif s.is_untested(u, w):
            if budget == 0:
                break
            budget -= 1
            hit = s.query(u, w, tag)
        else:
            continue
        if hit:
            path = p1[: iu + 1] + p2[j:]
            path = path[::-1] if flipped else path
            return max(path, best, key=len)
    return None


def clique_long_path(
    s: ExposureState, cycle: Sequence[int], u: int, v: int, k: int, eps: float
) -> tuple[list[int], float]:
    """A long ``u``-``v`` path through a clique's Hamilton cycle, without queries.

    Uses the longer arc when it exceeds ``(1-20eps)k``; otherwise stitches the
    longer arc's end near ``v`` to the shorter arc's start near ``u`` through a
    present edge, first inside windows of ``6eps*k`` vertices and then anywhere.
    """
    target = (1 - 20 * eps) * k
    fwd, bwd = _arcs(cycle, u, v)
    p1, p2 = (fwd, bwd) if len(fwd) >= len(bwd) else (bwd, fwd)
    if len(p1) - 1 > target:
        return p1, target
    t = math.ceil(6 * eps * k)
    inner1 = list(range(1, len(p1) - 1))
    inner2 = list(range(1, len(p2) - 1))

    def best_stitch(xs: list[int], ys: list[int]) -> list[int] | None:
        found, length = None, -1
        for i in xs:
            for j in ys:
                if s.is_present(p1[i], p2[j]):
                    cand = i + 1 + (len(p2) - 1 - j)
                    if cand > length:
                        found, length = (i, j), cand
        if found is None:
            return None
        i, j = found
        return p1[: i + 1] + p2[j:]

    path = best_stitch(inner1[-t:], inner2[:t]) or best_stitch(inner1, inner2)
    if path is None or len(path) < len(p1):
        path = p1
    return path, _claim(target, (len(cycle)) / 2, len(path) - 1)


# sides of a merge


@dataclass(frozen=True)
class _Side:
    cycle: tuple[int, ...]
    chain: tuple[int, ...]
    pivot: int | None
    bits: int = field(compare=False)

    @property
    def top(self) -> int:
        return self.chain[0]

    @property
    def bottom(self) -> int:
        return self.chain[-1]


def _rotating_side(J: RotatingCycle) -> _Side:
    return _Side(J.chain, J.chain, J.pivot, J.vertex_set.bits)


def _clique_side(s: ExposureState, T: Forest, cycle: Sequence[int]) -> _Side:
    """Clique cycle plus its vertical tree chain (the clique walk makes it one)."""
    chain = tuple(sorted(cycle, key=lambda v: T.depth[v]))
    if any(T.parent[b] != a for a, b in zip(chain, chain[1:])) or not s.is_present(chain[0], chain[-1]):
        chain = ()
    return _Side(tuple(cycle), chain, None, VertexSet.of(cycle).bits)


def _inner_path(
    s: ExposureState, side: _Side, x: int, y: int, k: int, eps: float, tag: str
) -> tuple[list[int], float]:
    """Path between two non-pivot vertices of the first side of a merge."""
    if side.pivot is None:
        return clique_long_path(s, side.cycle, x, y, k, eps)
    path = rotate_path_in_cycle(s, RotatingCycle(side.chain), x, y, k, eps, tag)
    arc = longer_arc(side.cycle, x, y)
    if path is None or len(path) < len(arc):
        path = arc
    return path, _claim((2 - 10 * eps) * k / 3, len(side.cycle) / 2, len(path) - 1)


def _outer_path(
    s: ExposureState, side: _Side, x: int, y: int, k: int, eps: float
) -> tuple[list[int], float]:
    if side.pivot is None:
        return clique_long_path(s, side.cycle, x, y, k, eps)
    arc = longer_arc(side.cycle, x, y)
    return arc, _claim((1 - 4 * eps) * k / 2, len(side.cycle) / 2, len(arc) - 1)


def _join(p1: Sequence[int], p4: Sequence[int], p2: Sequence[int], p3: Sequence[int]) -> list[int]:
    """``p1`` u1->u2, ``p4`` u2->v2, ``p2`` v1->v2, ``p3`` u1->v1; returns the closed cycle."""
    return list(p1) + list(p4[1:]) + list(p2[::-1][1:]) + list(p3[::-1][1:-1])


def _check_block(bbits: int, *sides: _Side) -> None:
    for side in sides:
        if side.bits & ~bbits:
            raise ValueError("cycle is not contained in the block")


def _merge_disjoint(
    s: ExposureState,
    T: Forest,
    block: VertexSet | Iterable[int],
    a: _Side,
    b: _Side,
    k: int,
    eps: float,
    tag: str,
    label: str,
) -> CycleCertificate:
    bbits = _as_bits(block)
    _check_block(bbits, a, b)
    if a.bits & b.bits:
        raise ValueError("cycles are not disjoint")
    tree_path: list[int] = []
    if a.chain and b.chain and T.comp[a.top] >= 0 and T.comp[a.top] == T.comp[b.top]:
        full = T.tree_path(a.top, b.top)
        last = max(i for i, v in enumerate(full) if a.bits >> v & 1)
        first = next(i for i in range(last, len(full)) if b.bits >> full[i] & 1)
        tree_path = full[last : first + 1]
        if tree_path[0] != a.top:
            a, b = b, a
            full = T.tree_path(a.top, b.top)
            last = max(i for i, v in enumerate(full) if a.bits >> v & 1)
            first = next(i for i in range(last, len(full)) if b.bits >> full[i] & 1)
            tree_path = full[last : first + 1]
            if tree_path[0] != a.top:
                tree_path = []
    g = _present_graph(s)
    dp = two_disjoint_paths(g, VertexSet(a.bits), VertexSet(b.bits), vertices=VertexSet(bbits))
    p1, p2 = list(dp.first), list(dp.second)
    if a.pivot is not None and a.pivot in (p1[0], p2[0]):
        if p2[0] == a.pivot:
            p1, p2 = p2, p1
        tail = _pivot_route(s, tree_path, a, b, p1, p2, k, eps, label)
        if isinstance(tail, CycleCertificate):
            return tail
        if tail is None:
            p3, b3 = _outer_path(s, a, p1[0], p2[0], k, eps)
            p4, b4 = _outer_path(s, b, p1[-1], p2[-1], k, eps)
            return _certify(s, _join(p1, p4, p2, p3), (label, "two-arcs"), b3 + b4)
        p1, p2 = tail
    p3, b3 = _inner_path(s, a, p1[0], p2[0], k, eps, tag)
    p4, b4 = _outer_path(s, b, p1[-1], p2[-1], k, eps)
    cycle = _join(p1, p4, p2, p3)
    return _certify(s, cycle, (label, "two-arcs"), b3 + b4)


def _pivot_route(
    s: ExposureState,
    tree_path: list[int],
    a: _Side,
    b: _Side,
    p1: list[int],
    p2: list[int],
    k: int,
    eps: float,
    label: str,
) -> CycleCertificate | tuple[list[int], list[int]] | None:
    """Handle a Menger path starting at the pivot ``p1[0]`` of the first side.

    ``None`` means no usable tree path exists and the caller falls back to arcs.
    """
    w1 = a.top

    def whole_chain(q1: list[int], q2: list[int]) -> CycleCertificate:
        # q1: pivot -> b, q2: top -> b; the first side is used as its full tree path.
        p4, b4 = _outer_path(s, b, q1[-1], q2[-1], k, eps)
        inner = list(a.chain[1:-1])
        cycle = list(q1) + list(p4[1:]) + list(q2[::-1][1:]) + inner
        actual = len(cycle)
        bound = _claim(3 * (1 - 4 * eps) * k / 2, len(a.chain) + 1 + b4, actual)
        return _certify(s, cycle, (label, "pivot-reroute"), bound)

    if p2[0] == w1:
        return whole_chain(p1, p2)
    if not tree_path:
        return None
    on1 = {v: i for i, v in enumerate(p1)}
    on2 = {v: i for i, v in enumerate(p2)}
    for j, z in enumerate(tree_path[1:], start=1):
        if z in on1:
            return tree_path[: j + 1] + p1[on1[z] + 1 :], p2
        if z in on2:
            return whole_chain(p1, tree_path[: j + 1] + p2[on2[z] + 1 :])
        if b.bits >> z & 1:
            return whole_chain(p1, tree_path[: j + 1])
    raise AssertionError("tree path never reached the second cycle")


def _merge_intersecting(
    s: ExposureState,
    T: Forest,
    block: VertexSet | Iterable[int],
    a: _Side,
    b: _Side,
    k: int,
    eps: float,
    tag: str,
    label: str,
) -> CycleCertificate:
    bbits = _as_bits(block)
    _check_block(bbits, a, b)
    if not a.chain or not b.chain:
        raise ValueError("both cycles must be vertical tree chains")
    if T.depth[a.top] > T.depth[b.top]:
        a, b = b, a
    shared = a.bits & b.bits
    c1, c2 = list(a.chain), list(b.chain)
    size = shared.bit_count()
    pos1 = {v: i for i, v in enumerate(c1)}
    ia_w = max(pos1[v] for v in iter_bits(shared))
    w = c1[ia_w]
    v2 = c2[0]
    if v2 not in pos1 or c2[size - 1] != w:
        raise ValueError("intersection is not the chain segment from the lower top")
    ia_v2 = pos1[v2]
    len1, len2 = len(c1), len(c2)
    if size == 1:
        return _single_vertex_merge(s, bbits, a, b, w, label)

    head = [c1[0]] + c1[ia_w:][::-1] + c2[size:]
    if size >= 100 * eps * k:
        u2 = c2[-1]
        budget = math.ceil(eps * k)
        for x in sorted((c1[i] for i in range(ia_v2, ia_w)), key=lambda v: -T.depth[v]):
            if s.is_present(u2, x):
                hit = True
            elif s.is_untested(u2, x) and budget > 0:
                budget -= 1
                hit = s.query(u2, x, tag)
            else:
                if budget == 0:
                    break
                continue
            if hit:
                cycle = head + c1[1 : pos1[x] + 1][::-1]
                formula = len1 + len2 - size - 5 * eps * k
                return _certify(s, cycle, (label, "window-chord"), _claim(formula, len(cycle), len(cycle)))
    cycle = head + c1[1 : ia_v2 + 1][::-1]
    return _certify(s, cycle, (label, "drop-intersection"), len1 + len2 - 2 * size)


def _single_vertex_merge(
    s: ExposureState, bbits: int, a: _Side, b: _Side, w: int, label: str
) -> CycleCertificate:
    """Cycles meeting in one vertex: join them through a shortest path avoiding it."""
    g = _present_graph(s)
    allowed = bbits & ~(1 << w)
    src = a.bits & ~(1 << w)
    dst = b.bits & ~(1 << w)
    prev = {v: -1 for v in iter_bits(src)}
    queue = deque(iter_bits(src))
    end = -1
    while queue:
        x = queue.popleft()
        if dst >> x & 1:
            end = x
            break
        for y in iter_bits(g.adj[x] & allowed):
            if y not in prev and not (src >> y & 1):
                prev[y] = x
                queue.append(y)
    if end < 0:
        raise ValueError("the block has a cut vertex at the shared vertex")
    q = [end]
    while prev[q[-1]] >= 0:
        q.append(prev[q[-1]])
    q.reverse()
    arc1 = longer_arc(a.cycle, w, q[0])
    arc2 = longer_arc(b.cycle, q[-1], w)
    cycle = arc1 + q[1:-1] + arc2[:-1]
    bound = (len(a.cycle) + len(b.cycle)) / 2 + 1
    return _certify(s, cycle, (label, "single-shared-vertex"), _claim(bound, len(cycle), len(cycle)))


# public merges


def merge_clique_clique(
    s: ExposureState,
    block: VertexSet | Iterable[int],
    C1: Sequence[int],
    C2: Sequence[int],
    k: int,
    eps: float,
) -> CycleCertificate:
    """Join two clique Hamilton cycles (given in cyclic order) through Menger paths; no queries."""
    bbits = _as_bits(block)
    a = _Side(tuple(C1), (), None, VertexSet.of(C1).bits)
    b = _Side(tuple(C2), (), None, VertexSet.of(C2).bits)
    _check_block(bbits, a, b)
    if a.bits & b.bits:
        raise ValueError("clique remainders overlap")
    dp = two_disjoint_paths(_present_graph(s), VertexSet(a.bits), VertexSet(b.bits), vertices=VertexSet(bbits))
    p1, p2 = list(dp.first), list(dp.second)
    p3, b3 = clique_long_path(s, a.cycle, p1[0], p2[0], k, eps)
    p4, b4 = clique_long_path(s, b.cycle, p1[-1], p2[-1], k, eps)
    return _certify(s, _join(p1, p4, p2, p3), ("clique-clique",), b3 + b4)


def merge_rotating_disjoint(
    s: ExposureState,
    T: Forest,
    block: VertexSet | Iterable[int],
    J1: RotatingCycle,
    J2: RotatingCycle,
    k: int,
    eps: float,
    tag: str = "Q4",
) -> CycleCertificate:
    if J1.vertex_set.bits & J2.vertex_set.bits:
        raise ValueError("rotating cycles are not disjoint")
    return _merge_disjoint(
        s, T, block, _rotating_side(J1), _rotating_side(J2), k, eps, tag, "rotating-disjoint"
    )


def merge_rotating_intersecting(
    s: ExposureState,
    T: Forest,
    block: VertexSet | Iterable[int],
    J1: RotatingCycle,
    J2: RotatingCycle,
    k: int,
    eps: float,
    tag: str = "Q4",
) -> CycleCertificate:
    shared = len(J1.vertex_set & J2.vertex_set)
    if shared == 0:
        raise ValueError("rotating cycles do not intersect")
    if shared > (1 - 15 * eps) * k:
        raise ValueError(f"intersection of {shared} vertices exceeds (1-15eps)k")
    return _merge_intersecting(
        s, T, block, _rotating_side(J1), _rotating_side(J2), k, eps, tag, "rotating-intersecting"
    )


def merge_mixed(
    s: ExposureState,
    T: Forest,
    block: VertexSet | Iterable[int],
    J: RotatingCycle,
    clique_cycle: Sequence[int],
    k: int,
    eps: float,
    tag: str = "Q4",
) -> CycleCertificate:
    """Merge a rotating cycle with a clique's Hamilton cycle (given in cyclic order)."""
    a = _rotating_side(J)
    b = _clique_side(s, T, clique_cycle)
    shared = (a.bits & b.bits).bit_count()
    if shared > (1 - 30 * eps) * k:
        raise ValueError(f"overlap of {shared} vertices exceeds (1-30eps)k")
    if shared == 0:
        return _merge_disjoint(s, T, block, a, b, k, eps, tag, "mixed-disjoint")
    return _merge_intersecting(s, T, block, a, b, k, eps, tag, "mixed-intersecting")
