"""Isolating cuts: per-terminal minimum separators for an independent terminal
set, with matching-based component sparsification.

Pipeline: split the terminals by index bits and compute one (A, B)-separator
per bit; the union of those separators isolates each terminal in its own
component. Each component then becomes a small sink instance (component plus
its boundary, boundary edges dropped, a sink wired to the boundary) that is
shrunk further by removing the source-sink common neighborhood (an exact
additive offset) and keeping only a matching-preserving subset of the
boundary before the final s-t solve.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph
from .matching import repeat_matching_reduce, set_vertex_connectivity, st_vertex_connectivity


@dataclass(frozen=True)
class SinkInstance:
    """Compact local graph with an added sink; keeps the id mapping around."""

    graph: Graph
    sink: int
    to_global: tuple[int, ...]  # local id -> original id; sink itself excluded

    def to_local(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.to_global)}

    def globalize(self, locals_) -> frozenset[int]:
        return frozenset(self.to_global[v] for v in locals_ if v != self.sink)


@dataclass(frozen=True)
class SparsifiedComponent:
    """Result of shrinking one component instance: G'' plus the exact offset."""

    instance: SinkInstance
    removed_common: frozenset[int]  # Z: boundary vertices adjacent to both s and sink
    kept_boundary: frozenset[int]  # D: matching-preserving boundary subset


@dataclass(frozen=True)
class IsolatingResult:
    per_terminal: dict[int, tuple[frozenset[int], int]]
    best: tuple[int, frozenset[int], int]  # terminal, separator, size


def build_sink_instance(g: Graph, component) -> SinkInstance:
    """The component's induced closed neighborhood with boundary edges removed
    and a sink adjacent to every boundary vertex."""
    U = frozenset(component)
    boundary = g.set_neighborhood(U)
    order = sorted(U) + sorted(boundary)
    local = {v: i for i, v in enumerate(order)}
    sink = len(order)
    edges = []
    for u in sorted(U):
        for v in g.adjacency[u]:
            if v in U and u < v:
                edges.append((local[u], local[v]))
            elif v in boundary:
                edges.append((local[u], local[v]))
    edges.extend((local[b], sink) for b in sorted(boundary))
    return SinkInstance(Graph.from_edges(sink + 1, edges), sink, tuple(order))


def sparsify_component(g: Graph, component, s: int) -> SparsifiedComponent:
    """Shrink the sink instance of `component` around the source s.

    Removes Z = N(s) intersect N(sink) (every such vertex sits in every
    (s, sink)-separator, so sizes shift by exactly |Z|), then keeps only a
    boundary subset D that preserves maximum matching against the component.
    The resulting instance has at most |U| * O(log n) vertices.
    """
    U = frozenset(component)
    if s not in U:
        raise ValueError("source must belong to the component")
    boundary = g.set_neighborhood(U)
    Z = frozenset(g.neighbor_sets[s] & boundary)
    rest = boundary - Z
    cross_edges = [(u, b) for u in U for b in g.neighbor_sets[u] & rest]
    if len(U) <= len(rest):
        D = repeat_matching_reduce(U, rest, cross_edges)
    else:
        D = frozenset(rest)
    order = sorted(U) + sorted(D)
    local = {v: i for i, v in enumerate(order)}
    sink = len(order)
    edges = []
    for u in sorted(U):
        for v in g.adjacency[u]:
            if v in U and u < v:
                edges.append((local[u], local[v]))
            elif v in D:
                edges.append((local[u], local[v]))
    edges.extend((local[b], sink) for b in sorted(D))
    inst = SinkInstance(Graph.from_edges(sink + 1, edges), sink, tuple(order))
    return SparsifiedComponent(inst, Z, frozenset(D))


def cut_equivalent_y(inst: SinkInstance) -> tuple[Graph, frozenset[int]]:
    """Replace the sink by one pendant per boundary vertex.

    (s, Y)-separators of the result correspond exactly to (s, sink)-separators
    of the instance, so connectivity values agree.
    """
    boundary = sorted(inst.graph.adjacency[inst.sink])
    n = inst.sink  # drop the sink id, reuse its slot for pendants
    edges = [(u, v) for u, v in inst.graph.edges() if inst.sink not in (u, v)]
    pendants = []
    nxt = n
    for b in boundary:
        edges.append((b, nxt))
        pendants.append(nxt)
        nxt += 1
    return Graph.from_edges(nxt, edges), frozenset(pendants)


def cluster_isolating_cuts(g: Graph, cluster, terminals) -> tuple[frozenset[int], int] | None:
    """Isolating cuts constrained to a cluster: best (L, |N(L)|) with L inside
    the cluster, containing exactly one terminal, and N(L) avoiding terminals.

    The cluster boundary is first replaced by a matching-preserving subset
    plus an exact offset; pendant terminals attached to the kept boundary
    force candidate sets to stay inside the cluster. The winning terminal's
    witness is then materialized exactly on the original graph by one solve
    with the other terminals contracted into the sink. Returns None when no
    terminal admits a feasible set.
    """
    from .minnncc import batched_boundary_sparsify  # local import: sibling module

    C = frozenset(cluster)
    T = sorted(set(terminals))
    if len(T) < 2 or not frozenset(T) <= C:
        raise ValueError("need >= 2 terminals inside the cluster")
    kept, offset = batched_boundary_sparsify(g, C, 1, T, matching_side=C - frozenset(T))
    order = sorted(C) + sorted(kept)
    local = {v: i for i, v in enumerate(order)}
    edges = []
    for u in sorted(C):
        for v in g.adjacency[u]:
            if (v in C and u < v) or v in kept:
                edges.append((local[u], local[v]))
    pendants = []
    nxt = len(order)
    for b in sorted(kept):
        edges.append((local[b], nxt))
        pendants.append(nxt)
        nxt += 1
    H = Graph.from_edges(nxt, edges)
    inner = isolating_cuts(
        H, range(nxt), [local[t] for t in T] + pendants, solve_for=[local[t] for t in T]
    )
    best: tuple[int, int] | None = None  # (value, terminal)
    for t in T:
        sep, size = inner.per_terminal[local[t]]
        if best is None or (size + offset, t) < best:
            best = (size + offset, t)
    assert best is not None
    return _cluster_isolating_witness(g, C, T, best[1])


def _cluster_isolating_witness(g: Graph, C: frozenset[int], T: list[int], s: int) -> tuple[frozenset[int], int] | None:
    """Exact minimizer of |N(L)| with s in L, L in C, no other terminal in L
    or N(L); other terminals are contracted into the sink so they are pinned
    to the far side."""
    others = frozenset(T) - {s}
    boundary = g.set_neighborhood(C)
    keep = sorted((C | boundary) - others)
    local = {v: i for i, v in enumerate(keep)}
    sink = len(keep)
    edges = set()
    for u in keep:
        for v in g.adjacency[u]:
            if v in others:
                edges.add((local[u], sink))
            elif v in local and u < v:
                if u in C or v in C:
                    edges.add((local[u], local[v]))
    for b in boundary - others:
        edges.add((local[b], sink))
    H = Graph.from_edges(sink + 1, sorted(edges))
    if H.has_edge(local[s], sink):
        return None  # s is adjacent to another terminal's contraction: infeasible
    res = st_vertex_connectivity(H, local[s], sink)
    comp = H.component_of(local[s], res.separator)
    L = frozenset(keep[v] for v in comp if v != sink)
    assert L <= C, "witness escaped the cluster"
    return L, len(g.set_neighborhood(L))


def isolating_cuts(g: Graph, cluster, terminals, solve_for=None) -> IsolatingResult:
    """Minimum (v, T-{v})-separators for every terminal v of an independent set T.

    `solve_for` restricts the per-terminal solves to a subset of T (the
    splitting phase always uses all of T).
    """
    C = frozenset(cluster)
    T = sorted(set(terminals))
    if len(T) < 2:
        raise ValueError("need at least two terminals")
    if not frozenset(T) <= C:
        raise ValueError("terminals must lie inside the cluster")
    for a in T:
        if g.neighbor_sets[a] & frozenset(T):
            raise ValueError("terminal set is not independent")
    wanted = T if solve_for is None else sorted(set(solve_for))
    if not frozenset(wanted) <= frozenset(T):
        raise ValueError("solve_for must be a subset of the terminals")

    bits = max(1, (len(T) - 1).bit_length())
    removed: set[int] = set()
    for bit in range(bits):
        A = frozenset(T[i] for i in range(len(T)) if not i >> bit & 1)
        B = frozenset(T[i] for i in range(len(T)) if i >> bit & 1)
        res = set_vertex_connectivity(g, A, B)
        assert res.cut.kind == "proper", "independent terminals always separate"
        removed.update(res.separator)

    per_terminal: dict[int, tuple[frozenset[int], int]] = {}
    claimed: set[int] = set()
    for s in wanted:
        if s in removed:  # defensive: separators never contain terminals
            comp: frozenset[int] = frozenset({s})
        else:
            comp = g.component_of(s, frozenset(removed))
        assert not (comp - {s}) & claimed, "terminal components must be disjoint"
        claimed.update(comp)
        spars = sparsify_component(g, comp, s)
        local = spars.instance.to_local()
        res = st_vertex_connectivity(spars.instance.graph, local[s], spars.instance.sink)
        separator = spars.instance.globalize(res.separator) | spars.removed_common
        per_terminal[s] = (separator, len(separator))
    best_terminal = min(per_terminal, key=lambda v: (per_terminal[v][1], v))
    sep, size = per_terminal[best_terminal]
    return IsolatingResult(per_terminal, (best_terminal, sep, size))
