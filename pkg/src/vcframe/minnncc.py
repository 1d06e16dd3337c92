"""Minimum-neighbor search inside a near-clique cluster.

Sources are sampled from the cluster, the cluster boundary is shrunk once in
a batch (an exact additive offset K plus a matching-preserving subset), and
each source then solves a small s-t instance whose value kappa + |Z_x| + K
equals min |N(L)| over L containing that source. The best source's witness
set is materialized by one unsparsified sink solve, so the returned (L,
size) is always exact and valid even when the input guarantees fail.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .graph import Graph, neighborhood_difference
from .isolating import SinkInstance
from .matching import greedy_maximal_matching, st_vertex_connectivity
from .seeds import rng_for

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinnnccCfg:
    sample_mult: int = 4  # sources sampled: ceil(mult * |C| * log2(n) / ell)
    sparsify_rounds: int | None = None  # default ceil(3 * log2 n)


@dataclass(frozen=True)
class LocalInstance:
    """Per-source graph H_x with its exact reconstruction offsets."""

    instance: SinkInstance
    x: int
    z_x: frozenset[int]  # boundary kept-vertices adjacent to x, removed up front
    offset_k: int  # batched-sparsification offset


def batched_boundary_sparsify(
    g: Graph, cluster, ell: int, sources, matching_side=None
) -> tuple[frozenset[int], int]:
    """Replace the cluster boundary by a small kept set C' plus an offset K.

    Boundary vertices adjacent to every source are deleted and counted in K
    (they sit inside N(L) for any L containing a source). The rest is peeled
    by repeated maximal matchings so the per-source minimum-neighbor value
    over the kept graph differs from the true one by exactly K.

    `matching_side` overrides the cluster side used in the peeling rounds;
    passing C minus the sources preserves the variant where each candidate
    set contains exactly one source.
    """
    C = frozenset(cluster)
    X = frozenset(sources)
    if not X <= C:
        raise ValueError("sources must lie inside the cluster")
    if not X:
        return frozenset(), 0
    boundary = g.set_neighborhood(C)
    common = frozenset.intersection(*(g.neighbor_sets[x] for x in X)) & boundary
    keep = set()
    for x in X:
        keep.update(g.neighbor_sets[x] & boundary)
    keep -= common
    worst = max(
        (neighborhood_difference(g, u, v) for u in sorted(X) for v in sorted(C) if u < v),
        default=0,
    )
    if worst > 4 * max(ell, 1) * max(g.n.bit_length(), 1):
        logger.debug("cluster neighborhood difference %d is large for ell=%d", worst, ell)
    side = C if matching_side is None else frozenset(matching_side)
    rounds = math.ceil(3 * math.log2(max(g.n, 2)))
    adj = {u: g.neighbor_sets[u] & boundary for u in side}
    for _ in range(rounds):
        available = boundary - common - keep
        matched = greedy_maximal_matching(side, available, adj)
        if not matched:
            break
        keep.update(b for _, b in matched)
    return frozenset(keep), len(common)


def construct_source_instance(g: Graph, cluster, kept_boundary, offset_k: int, x: int) -> LocalInstance:
    """Build H_x: the cluster plus the kept boundary minus x's part of it.

    Boundary vertices adjacent to x (Z_x) are removed and counted as an
    offset. Edges joining two cluster-neighbors of x are dropped: both
    endpoints stay visible through x, so |N(L)| is unchanged for every L
    containing x, and each vertex keeps only its neighborhood-difference
    worth of edges outside N(x). Edges among boundary vertices never
    appear. The sink is wired to the kept boundary outside N(x).
    """
    C = frozenset(cluster)
    if x not in C:
        raise ValueError("source must lie inside the cluster")
    kept = frozenset(kept_boundary)
    z_x = frozenset(g.neighbor_sets[x] & kept)
    outer = kept - z_x
    nx_in_c = g.neighbor_sets[x] & C
    order = sorted(C) + sorted(outer)
    local = {v: i for i, v in enumerate(order)}
    sink = len(order)
    edges = []
    for v in sorted(C):
        v_is_nx = v in nx_in_c
        for w in g.adjacency[v]:
            if w in C:
                if v < w and not (v_is_nx and w in nx_in_c):
                    edges.append((local[v], local[w]))
            elif w in outer:
                edges.append((local[v], local[w]))
    edges.extend((local[b], sink) for b in sorted(outer))
    inst = SinkInstance(Graph.from_edges(sink + 1, edges), sink, tuple(order))
    return LocalInstance(inst, x, z_x, offset_k)


def source_objective(g: Graph, local: LocalInstance) -> int:
    """min |N_G(L)| over L containing the instance's source, from one s-t solve."""
    pos = local.instance.to_local()
    res = st_vertex_connectivity(local.instance.graph, pos[local.x], local.instance.sink)
    return res.kappa + len(local.z_x) + local.offset_k


def minnncc_sample_size(cfg: MinnnccCfg, n: int, cluster_size: int, ell: int) -> int:
    """Number of sources sampled for a cluster (capped at the cluster size)."""
    want = math.ceil(cfg.sample_mult * cluster_size * math.log2(max(n, 2)) / max(1, ell))
    return min(want, cluster_size)


def min_neighbor_sink_instance(g: Graph, cluster) -> SinkInstance:
    """Unsparsified sink instance: cluster, full boundary, sink on the boundary."""
    C = frozenset(cluster)
    boundary = g.set_neighborhood(C)
    order = sorted(C) + sorted(boundary)
    local = {v: i for i, v in enumerate(order)}
    sink = len(order)
    edges = []
    for u in sorted(C):
        for v in g.adjacency[u]:
            if (v in C and u < v) or v in boundary:
                edges.append((local[u], local[v]))
    edges.extend((local[b], sink) for b in sorted(boundary))
    return SinkInstance(Graph.from_edges(sink + 1, edges), sink, tuple(order))


def witness_for_source(g: Graph, cluster, x: int) -> tuple[frozenset[int], int]:
    """Exact minimizer of |N_G(L)| over L containing x inside the cluster."""
    C = frozenset(cluster)
    inst = min_neighbor_sink_instance(g, C)
    pos = inst.to_local()
    res = st_vertex_connectivity(inst.graph, pos[x], inst.sink)
    comp = inst.graph.component_of(pos[x], res.separator)
    L = inst.globalize(comp)
    assert L <= C, "minimizer escaped the cluster"
    return L, len(g.set_neighborhood(L))


def min_nncc(
    g: Graph,
    cluster,
    ell: int,
    cfg: MinnnccCfg | None = None,
    seed: int = 0,
) -> tuple[frozenset[int], int]:
    """Minimize |N_G(L)| over non-empty L inside the cluster.

    Exact whenever a sampled source hits some minimizer (always when the
    sample covers the cluster); otherwise still returns a valid set and its
    true neighborhood size.
    """
    C = frozenset(cluster)
    if not C:
        raise ValueError("cluster must be non-empty")
    if len(C) + len(g.set_neighborhood(C)) >= g.n:
        raise ValueError("cluster dominates the graph: no outside vertex to cut from")
    cfg = cfg or MinnnccCfg()
    ell = max(1, ell)
    want = minnncc_sample_size(cfg, g.n, len(C), ell)
    members = sorted(C)
    if want >= len(C):
        X = members
    else:
        X = sorted(rng_for(seed, "minnncc-sample").sample(members, want))
    kept, offset = batched_boundary_sparsify(g, C, ell, X)
    best_x: int | None = None
    best_val = None
    for x in X:
        val = source_objective(g, construct_source_instance(g, C, kept, offset, x))
        if best_val is None or (val, x) < (best_val, best_x):
            best_val, best_x = val, x
    assert best_x is not None
    L, size = witness_for_source(g, C, best_x)
    if size != best_val:
        logger.debug("sparsified objective %s differs from exact %s (guarantees violated)", best_val, size)
    return L, size
