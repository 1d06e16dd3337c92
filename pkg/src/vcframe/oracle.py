"""Independent ground-truth solvers: exhaustive search and max-flow/Menger.

Everything here exists to verify the framework modules, so the priorities
are exactness and determinism, not speed. Tie-breaking is pinned (smallest
separator, then lexicographic) so golden tests are stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .graph import Graph, VertexCut, cut_from_side

BRUTE_FORCE_LIMIT = 14
MIN_NEIGHBOR_LIMIT = 20


class OracleLimitError(ValueError):
    """Input exceeds the configured exhaustive-search limit."""


@dataclass(frozen=True)
class OracleAnswer:
    kappa: int
    witness: VertexCut
    disjoint_paths: tuple[tuple[int, ...], ...] | None = None


def brute_force_vc(g: Graph, limit: int = BRUTE_FORCE_LIMIT) -> OracleAnswer:
    """Global vertex connectivity by trying every separator, smallest first."""
    if g.n > limit:
        raise OracleLimitError(f"brute force limited to n <= {limit}, got n = {g.n}")
    if g.n < 1:
        raise ValueError("graph must have at least one vertex")
    vertices = range(g.n)
    for k in range(0, g.n - 1):
        for sep in combinations(vertices, k):
            sep_set = frozenset(sep)
            comps = g.components(removed=sep_set)
            if len(comps) >= 2:
                comps.sort(key=min)
                L = comps[0]
                R = frozenset(range(g.n)) - L - sep_set
                return OracleAnswer(k, VertexCut.proper(L, sep_set, R))
    return OracleAnswer(g.n - 1, VertexCut.degenerate(g.n))


def _split_network(g: Graph, big: int):
    """Vertex-split digraph: node 2v is v_in, 2v+1 is v_out.

    Every arc also gets an explicit 0-capacity reverse entry so the flow
    result shares the sparsity pattern and residual arcs are exactly the
    entries with cap - flow > 0.
    """
    rows, cols, caps = [], [], []

    def arc(i, j, c):
        rows.append(i)
        cols.append(j)
        caps.append(c)
        rows.append(j)
        cols.append(i)
        caps.append(0)

    for v in range(g.n):
        arc(2 * v, 2 * v + 1, 1)
    for u, v in g.edges():
        arc(2 * u + 1, 2 * v, big)
        arc(2 * v + 1, 2 * u, big)
    mat = csr_matrix(
        (np.asarray(caps, dtype=np.int32), (np.asarray(rows), np.asarray(cols))),
        shape=(2 * g.n, 2 * g.n),
    )
    return mat


def _residual_reachable(cap: csr_matrix, flow: csr_matrix, source: int) -> set[int]:
    seen = {source}
    stack = [source]
    ci, cx = cap.indices, cap.data
    fi, fx = flow.indices, flow.data
    indptr = cap.indptr
    assert np.array_equal(cap.indptr, flow.indptr) and np.array_equal(ci, fi)
    while stack:
        i = stack.pop()
        for k in range(indptr[i], indptr[i + 1]):
            j = ci[k]
            if j not in seen and cx[k] - fx[k] > 0:
                seen.add(j)
                stack.append(j)
    return seen


def _decompose_paths(flow: csr_matrix, source: int, sink: int, value: int) -> list[list[int]]:
    """Split an integral flow into `value` source-sink paths (cycles cancelled)."""
    arcs: dict[int, dict[int, int]] = {}
    coo = flow.tocoo()
    for i, j, f in zip(coo.row, coo.col, coo.data):
        if f > 0:
            arcs.setdefault(int(i), {})[int(j)] = int(f)
    paths = []
    for _ in range(value):
        node = source
        walk = [source]
        pos = {source: 0}
        while node != sink:
            nxt = min(j for j, f in arcs[node].items() if f > 0)
            arcs[node][nxt] -= 1
            if arcs[node][nxt] == 0:
                del arcs[node][nxt]
            if nxt in pos:
                for dropped in walk[pos[nxt] + 1 :]:
                    del pos[dropped]
                del walk[pos[nxt] + 1 :]
            else:
                walk.append(nxt)
                pos[nxt] = len(walk) - 1
            node = nxt
        paths.append(walk)
    return paths


def flow_st_kappa(g: Graph, s: int, t: int, return_paths: bool = True) -> OracleAnswer:
    """kappa(s, t) by unit-vertex-capacity max flow, with separator and Menger paths.

    Adjacent s, t have no separator; returns the degenerate n-1 answer.
    """
    if s == t:
        raise ValueError("s and t must differ")
    if g.has_edge(s, t):
        return OracleAnswer(g.n - 1, VertexCut.degenerate(g.n))
    big = g.n + 1
    cap = _split_network(g, big)
    source, sink = 2 * s + 1, 2 * t
    res = maximum_flow(cap, source, sink)
    kappa = int(res.flow_value)
    reach = _residual_reachable(cap, res.flow, source)
    sep = frozenset(v for v in range(g.n) if 2 * v in reach and 2 * v + 1 not in reach)
    assert len(sep) == kappa, "residual cut does not match flow value"
    L = g.component_of(s, sep) if kappa > 0 else g.component_of(s)
    R = frozenset(range(g.n)) - L - sep
    witness = VertexCut.proper(L, sep, R)
    paths = None
    if return_paths:
        raw = _decompose_paths(res.flow, source, sink, kappa)
        # A walk alternates v_out, v_in nodes; s contributes only s_out.
        paths = tuple(tuple([s] + [node // 2 for node in walk if node % 2 == 0]) for walk in raw)
    return OracleAnswer(kappa, witness, paths)


def flow_set_kappa(g: Graph, sources, sinks) -> OracleAnswer:
    """Minimum (A, B)-separator by max flow with A and B contracted.

    When an A-B edge exists there is no separator and the degenerate
    answer is returned, mirroring the n-1 convention.
    """
    A, B = frozenset(sources), frozenset(sinks)
    if not A or not B:
        raise ValueError("both vertex sets must be non-empty")
    if A & B:
        raise ValueError("vertex sets must be disjoint")
    if any(g.neighbor_sets[a] & B for a in A):
        return OracleAnswer(g.n - 1, VertexCut.degenerate(g.n))
    big = g.n + 1
    rows, cols, caps = [], [], []

    def arc(i, j, c):
        rows.append(i)
        cols.append(j)
        caps.append(c)
        rows.append(j)
        cols.append(i)
        caps.append(0)

    ss, tt = 2 * g.n, 2 * g.n + 1
    for v in range(g.n):
        arc(2 * v, 2 * v + 1, big if (v in A or v in B) else 1)
    for u, v in g.edges():
        arc(2 * u + 1, 2 * v, big)
        arc(2 * v + 1, 2 * u, big)
    for a in A:
        arc(ss, 2 * a, big)
    for b in B:
        arc(2 * b + 1, tt, big)
    cap = csr_matrix(
        (np.asarray(caps, dtype=np.int32), (np.asarray(rows), np.asarray(cols))),
        shape=(2 * g.n + 2, 2 * g.n + 2),
    )
    res = maximum_flow(cap, ss, tt)
    kappa = int(res.flow_value)
    assert kappa <= g.n - 2, "separator size exceeds every proper cut"
    reach = _residual_reachable(cap, res.flow, ss)
    sep = frozenset(v for v in range(g.n) if 2 * v in reach and 2 * v + 1 not in reach)
    assert len(sep) == kappa
    L: set[int] = set()
    for a in A:
        if a not in sep:
            L.update(g.component_of(a, sep))
    L_f = frozenset(L) if L else frozenset(A)
    R = frozenset(range(g.n)) - L_f - sep
    return OracleAnswer(kappa, VertexCut.proper(L_f, sep, R))


def _unpack_mask(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & (-mask)
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _subset_neighbor_scan(g: Graph, pool: list[int], keep_mask) -> tuple[frozenset[int], int]:
    """Minimize |N(L)| over non-empty L in `pool` passing `keep_mask`, with pinned
    tie-breaking (then smallest |L|, then lexicographic members)."""
    bits = g.adjacency_bits
    k = len(pool)
    pool_bit = [1 << v for v in pool]
    nbr_cache = [0] * (1 << k)
    l_cache = [0] * (1 << k)
    best_key: tuple | None = None
    best: tuple[frozenset[int], int] | None = None
    for mask in range(1, 1 << k):
        low = mask & (-mask)
        idx = low.bit_length() - 1
        rest = mask ^ low
        nbrs = nbr_cache[rest] | bits[pool[idx]]
        lmask = l_cache[rest] | pool_bit[idx]
        nbr_cache[mask] = nbrs
        l_cache[mask] = lmask
        outside = nbrs & ~lmask
        if not keep_mask(lmask, outside):
            continue
        size = outside.bit_count()
        lsize = mask.bit_count()
        if best_key is not None and (size, lsize) > best_key[:2]:
            continue
        key = (size, lsize, _unpack_mask(lmask))
        if best_key is None or key < best_key:
            best_key = key
            best = (frozenset(key[2]), size)
    if best is None:
        raise ValueError("no feasible subset")
    return best


def brute_force_min_neighbor(
    g: Graph, candidates, limit: int = MIN_NEIGHBOR_LIMIT
) -> tuple[frozenset[int], int]:
    """Minimize |N(L)| over non-empty L inside `candidates` by full enumeration."""
    pool = sorted(set(candidates))
    if not pool:
        raise ValueError("candidate set must be non-empty")
    if len(pool) > limit:
        raise OracleLimitError(f"min-neighbor enumeration limited to {limit} candidates")
    return _subset_neighbor_scan(g, pool, lambda lmask, outside: True)


def brute_force_min_neighbor_containing(
    g: Graph, candidates, x: int, limit: int = MIN_NEIGHBOR_LIMIT
) -> tuple[frozenset[int], int]:
    """Same as brute_force_min_neighbor but forcing x into L."""
    pool = sorted(set(candidates))
    if x not in pool:
        raise ValueError("x must be a candidate")
    if len(pool) > limit:
        raise OracleLimitError(f"min-neighbor enumeration limited to {limit} candidates")
    xbit = 1 << x
    return _subset_neighbor_scan(g, pool, lambda lmask, outside: lmask & xbit)


def brute_force_isolating(
    g: Graph, cluster, terminals, s: int, limit: int = MIN_NEIGHBOR_LIMIT
) -> tuple[frozenset[int], int]:
    """Minimum |N(L)| over L in `cluster` with L intersecting `terminals` exactly at s
    and N(L) avoiding the terminals."""
    pool = sorted(set(cluster))
    T = frozenset(terminals)
    if s not in T or s not in pool:
        raise ValueError("s must be a terminal inside the cluster")
    if len(pool) > limit:
        raise OracleLimitError(f"isolating enumeration limited to {limit} candidates")
    tmask = 0
    for v in T:
        tmask |= 1 << v
    sbit = 1 << s

    def keep(lmask, outside):
        return lmask & tmask == sbit and outside & tmask == 0

    return _subset_neighbor_scan(g, pool, keep)


def global_kappa_via_flow(g: Graph) -> int:
    """kappa(G) as the minimum of flow_st_kappa over non-adjacent pairs."""
    if g.n < 2:
        raise ValueError("need at least two vertices")
    best = g.n - 1
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if not g.has_edge(u, v):
                best = min(best, flow_st_kappa(g, u, v, return_paths=False).kappa)
    return best


def min_neighbor_via_flow(g: Graph, pool, x: int) -> int:
    """min |N(L)| over L containing x inside `pool`, via one s-t flow.

    A fresh sink adjacent to everything outside the pool pins L inside it.
    """
    pool = frozenset(pool)
    if x not in pool:
        raise ValueError("x must be in the pool")
    outside = [v for v in range(g.n) if v not in pool]
    n2 = g.n + 1
    edges = list(g.edges()) + [(v, g.n) for v in outside]
    aug = Graph.from_edges(n2, edges)
    return flow_st_kappa(aug, x, g.n, return_paths=False).kappa
