"""Independent certificate checks shared by module and acceptance tests."""

from __future__ import annotations

import networkx as nx

from longcycle.exposure import PRESENT, UNTESTED, ExposureState


def naive_ancestor(T, u, v):
    while v >= 0:
        if v == u:
            return True
        v = T.parent[v]
    return False


def dfs_violations(s: ExposureState, T, log, members) -> list[str]:
    """Everything the exploration certifies, checked without the forest's own index."""
    out = []
    members = set(members)
    tree = set(T.tree_edges())
    for u, w, hit in log:
        if hit and (min(u, w), max(u, w)) not in tree:
            out.append(f"successful query {u}-{w} is not a tree edge")
    for v in members:
        if T.comp[v] < 0:
            out.append(f"vertex {v} not spanned")
    for (a, b), st in zip(s.host.edge_array.tolist(), s.status.tolist()):
        if a not in members or b not in members:
            continue
        if st in (PRESENT, UNTESTED):
            if not (naive_ancestor(T, a, b) or naive_ancestor(T, b, a)):
                out.append(f"{'present' if st == PRESENT else 'untested'} edge {a}-{b} joins incomparable vertices")
    for a, b in tree:
        if s.status_of(a, b) != PRESENT:
            out.append(f"tree edge {a}-{b} is not present")
    return out


def component_violations(s: ExposureState, T, members) -> list[str]:
    """Expose the rest (on a copy) and compare components with the forest's trees."""
    members = sorted(members)
    full = exposed_copy(s)
    h = nx.Graph()
    h.add_nodes_from(members)
    ms = set(members)
    h.add_edges_from((a, b) for a, b in full.present_edges() if a in ms and b in ms)
    ours = sorted(sorted(v for v in members if T.comp[v] == c) for c in {T.comp[v] for v in members})
    theirs = sorted(sorted(c) for c in nx.connected_components(h))
    return [] if ours == theirs else ["forest components differ from the final random graph"]


def nx_blocks(g, members=None):
    """Blocks and cut vertices from networkx; isolated vertices count as blocks."""
    h = g.to_networkx()
    if members is not None:
        h = h.subgraph(members).copy()
    blocks = {frozenset(c) for c in nx.biconnected_components(h)}
    blocks |= {frozenset([v]) for v in h.nodes if h.degree(v) == 0}
    return frozenset(blocks), frozenset(nx.articulation_points(h))


def exposed_copy(s: ExposureState) -> ExposureState:
    """A copy of ``s`` with every remaining edge drawn, leaving ``s`` untouched."""
    full = ExposureState(s.host, s.p, seed=s.seed, stream=s.stream)
    full.status = s.status.copy()
    full.draws = s.draws.copy()
    full.untested_adj = list(s.untested_adj)
    full.present_adj = list(s.present_adj)
    full.expose_induced(range(s.host.n), tag="later")
    return full


def block_trial(host, p, seed):
    """DFS, then the block algorithm from the forest; returns a list of violations."""
    from longcycle.blocks import block_algorithm, decompose
    from longcycle.dfs import dfs_explore
    from longcycle.graph import Graph

    s = ExposureState(host, p, seed=seed)
    T, _ = dfs_explore(s)
    h = Graph.from_edges(host.n, T.tree_edges())
    blocks_h = len(decompose(h).blocks)
    M, d, log = block_algorithm(h, s)
    out = []
    added = sum(1 for step in log if step.present)
    if not added < blocks_h:
        out.append(f"{added} present edges added, not below {blocks_h} blocks")
    counts = [step.blocks_after for step in log if step.present]
    prev = blocks_h
    for c in counts:
        if c >= prev:
            out.append("block count did not decrease")
        prev = c
    final = exposed_copy(s).revealed_subgraph()
    if d.signature() != nx_blocks(final):
        out.append("final decomposition differs from the oracle")
    for a, b in M.edges():
        if not s.is_present(a, b):
            out.append(f"edge {a}-{b} of M is not present")
    return out
