"""Exact subset-DP oracles for small graphs, compiled with numba.

Adjacency is passed as a ``uint32`` array of neighbor bitmasks, so every
kernel here is limited to graphs with at most 32 vertices; the callers in
:mod:`longcycle.posa` apply much tighter size guards.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .graph import Graph


def adjacency_array(h: Graph) -> np.ndarray:
    if h.n > 32:
        raise ValueError("exact kernels support at most 32 vertices")
    return np.array(h.adj, dtype=np.uint32)


@njit(cache=True)
def _popcount(x):
    y = np.int64(x)
    c = 0
    while y:
        y &= y - 1
        c += 1
    return c


@njit(cache=True)
def path_ends(adj, n):
    """``ends[mask]`` = vertices at which some Hamilton path of ``G[mask]`` ends."""
    size = 1 << n
    ends = np.zeros(size, dtype=np.uint32)
    for v in range(n):
        ends[1 << v] = np.uint32(1 << v)
    for mask in range(1, size):
        e = ends[mask]
        if e == 0:
            continue
        for v in range(n):
            if (e >> v) & 1:
                nb = adj[v] & ~np.uint32(mask)
                for w in range(n):
                    if (nb >> w) & 1:
                        ends[mask | (1 << w)] |= np.uint32(1 << w)
    return ends


@njit(cache=True)
def start_ends(adj, n, s):
    """Like :func:`path_ends` but only for paths starting at ``s``."""
    size = 1 << n
    reach = np.zeros(size, dtype=np.uint32)
    reach[1 << s] = np.uint32(1 << s)
    for mask in range(1, size):
        if not (mask >> s) & 1:
            continue
        e = reach[mask]
        if e == 0:
            continue
        for v in range(n):
            if (e >> v) & 1:
                nb = adj[v] & ~np.uint32(mask)
                for w in range(n):
                    if (nb >> w) & 1:
                        reach[mask | (1 << w)] |= np.uint32(1 << w)
    return reach


@njit(cache=True)
def longest_path_length(adj, n):
    ends = path_ends(adj, n)
    best = 0
    for mask in range(1, 1 << n):
        if ends[mask] != 0:
            pc = _popcount(mask)
            if pc - 1 > best:
                best = pc - 1
    return best


@njit(cache=True)
def longest_cycle_length(adj, n):
    """Longest cycle, fixing its smallest vertex; 0 for forests."""
    size = 1 << n
    best = 0
    for s in range(n):
        low = (1 << s) - 1
        reach = np.zeros(size, dtype=np.uint32)
        reach[1 << s] = np.uint32(1 << s)
        for mask in range(1 << s, size):
            if (mask & low) != 0 or not (mask >> s) & 1:
                continue
            e = reach[mask]
            if e == 0:
                continue
            pc = _popcount(mask)
            if pc >= 3 and (e & adj[s]) != 0 and pc > best:
                best = pc
            for v in range(n):
                if (e >> v) & 1:
                    nb = adj[v] & ~np.uint32(mask) & ~np.uint32(low)
                    for w in range(n):
                        if (nb >> w) & 1:
                            reach[mask | (1 << w)] |= np.uint32(1 << w)
    return best


@njit(cache=True)
def hamilton_cycle(adj, n):
    """A Hamilton cycle as a vertex array starting at 0, or an empty array."""
    out = np.empty(0, dtype=np.int64)
    if n < 3:
        return out
    reach = start_ends(adj, n, 0)
    full = (1 << n) - 1
    last = -1
    for v in range(1, n):
        if (reach[full] >> v) & 1 and (adj[0] >> v) & 1:
            last = v
            break
    if last < 0:
        return out
    order = np.empty(n, dtype=np.int64)
    mask = full
    cur = last
    for i in range(n - 1, 0, -1):
        order[i] = cur
        prev_mask = mask & ~(1 << cur)
        nxt = -1
        e = reach[prev_mask]
        for u in range(n):
            if (e >> u) & 1 and (adj[u] >> cur) & 1:
                nxt = u
                break
        mask = prev_mask
        cur = nxt
    order[0] = cur
    return order


@njit(cache=True)
def booster_matrix(adj, n):
    """Longest-path length and a 0/1 matrix marking booster non-edges.

    Requires a non-Hamiltonian graph on at least 3 vertices.  A non-edge
    ``ab`` makes the graph Hamiltonian exactly when a Hamilton path runs from
    ``a`` to ``b``; otherwise it lengthens the longest path exactly when two
    disjoint paths ending at ``a`` and ``b`` cover at least ``L + 2`` vertices.
    """
    size = 1 << n
    full = size - 1
    ends = path_ends(adj, n)
    L = 0
    for mask in range(1, size):
        if ends[mask] != 0:
            pc = _popcount(mask) - 1
            if pc > L:
                L = pc
    out = np.zeros((n, n), dtype=np.uint8)
    if L == n - 1:
        for a in range(n):
            reach = start_ends(adj, n, a)
            r = reach[full]
            for b in range(n):
                if b != a and (r >> b) & 1 and not (adj[a] >> b) & 1:
                    out[a, b] = 1
        return L, out
    best = np.full((n, size), -1, dtype=np.int8)
    for mask in range(1, size):
        e = ends[mask]
        if e != 0:
            pc = _popcount(mask)
            for v in range(n):
                if (e >> v) & 1:
                    best[v, mask] = pc
    for v in range(n):
        for i in range(n):
            bit = 1 << i
            for U in range(size):
                if U & bit:
                    other = best[v, U ^ bit]
                    if other > best[v, U]:
                        best[v, U] = other
    for a in range(n):
        for b in range(a + 1, n):
            if (adj[a] >> b) & 1:
                continue
            found = False
            for m1 in range(1, size):
                if (m1 >> b) & 1 or not (ends[m1] >> a) & 1:
                    continue
                rest = best[b, full & ~m1]
                if rest > 0 and _popcount(m1) + rest >= L + 2:
                    found = True
                    break
            if found:
                out[a, b] = 1
                out[b, a] = 1
    return L, out


@njit(cache=True)
def min_violating_size(adj, n, limit):
    """Smallest ``|X| <= limit`` with ``|N(X)| < 2|X|``, or ``limit + 1``."""
    size = 1 << n
    nb = np.zeros(size, dtype=np.uint32)
    best = limit + 1
    for mask in range(1, size):
        low = mask & -mask
        v = 0
        while (low >> v) != 1:
            v += 1
        nb[mask] = nb[mask ^ low] | adj[v]
        pc = _popcount(mask)
        if pc >= best:
            continue
        if _popcount(nb[mask] & ~np.uint32(mask)) < 2 * pc:
            best = pc
    return best


@njit(cache=True)
def has_sparse_pair(adj, n, t):
    """Whether disjoint ``X, Y`` with ``|X|, |Y| >= t`` have no edges between them."""
    if 2 * t > n:
        return False
    size = 1 << n
    full = size - 1
    nb = np.zeros(size, dtype=np.uint32)
    for mask in range(1, size):
        low = mask & -mask
        v = 0
        while (low >> v) != 1:
            v += 1
        nb[mask] = nb[mask ^ low] | adj[v]
        if _popcount(mask) == t:
            outside = full & ~(nb[mask] | mask)
            if _popcount(outside) >= t:
                return True
    return False


@njit(cache=True)
def _connected(adj, n):
    if n == 0:
        return True
    seen = np.uint32(1)
    frontier = np.uint32(1)
    while frontier:
        nxt = np.uint32(0)
        for v in range(n):
            if (frontier >> v) & 1:
                nxt |= adj[v]
        nxt &= ~seen
        seen |= nxt
        frontier = nxt
    return _popcount(seen) == n


@njit(cache=True)
def catalog_stats(rows, n):
    """Per graph: connected, Hamiltonian, expansion order m, booster count.

    ``rows`` holds one adjacency array per graph.  Expansion order is the
    largest ``m`` for which the graph is an (m,2)-expander; boosters are only
    counted for connected non-Hamiltonian graphs (``-1`` otherwise).
    """
    g = rows.shape[0]
    out = np.full((g, 4), -1, dtype=np.int64)
    for i in range(g):
        adj = rows[i]
        conn = _connected(adj, n)
        out[i, 0] = 1 if conn else 0
        ham = n >= 3 and hamilton_cycle(adj, n).size == n
        out[i, 1] = 1 if ham else 0
        out[i, 2] = min_violating_size(adj, n, n) - 1
        if conn and not ham and n >= 3:
            _, mat = booster_matrix(adj, n)
            out[i, 3] = mat.sum() // 2
    return out


def exact_longest_path_or_cycle(h: Graph) -> tuple[int, int]:
    if h.n > 16:
        raise ValueError("exact longest path/cycle supports at most 16 vertices")
    if h.n == 0:
        return 0, 0
    adj = adjacency_array(h)
    return int(longest_path_length(adj, h.n)), int(longest_cycle_length(adj, h.n))


def exact_hamilton_cycle(h: Graph) -> list[int] | None:
    if h.n > 16:
        raise ValueError("exact Hamiltonicity supports at most 16 vertices")
    if h.n < 3:
        return None
    cyc = hamilton_cycle(adjacency_array(h), h.n)
    return [int(v) for v in cyc] if cyc.size else None


def expansion_order(h: Graph) -> int:
    """Largest ``m`` such that ``h`` is an (m,2)-expander (exact, n <= 24)."""
    if h.n > 24:
        raise ValueError("exact expansion check supports at most 24 vertices")
    if h.n == 0:
        return 0
    return int(min_violating_size(adjacency_array(h), h.n, h.n)) - 1
