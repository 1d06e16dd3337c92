"""Top-level drivers: the single-sink solver (clustering plus per-cluster
isolating cuts / min-neighbor), the global-to-single-sink sampling reduction,
and the reverse reduction solving bipartite vertex cover through global
vertex connectivity.

A single-sink run walks size estimates ell = 1, 2, 4, ...; for each it
builds a clustering with parameter 2*ell, trims the sink's closed
neighborhood out of every cluster, and harvests candidate cut sides from
(a) direct enumeration on very small clusters, (b) the cluster-constrained
isolating-cuts solver on a sampled independent terminal set, and (c) the
near-clique minimum-neighbor solver. Every candidate L yields the valid
t-sink cut (L, N(L), rest); the smallest candidate wins. Results of
per-cluster solves are cached across levels, boost rounds, and sinks, since
identical clusters recur constantly at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .clustering import ClusterCfg, com_nei_clustering
from .graph import (
    Graph,
    VertexCut,
    cut_from_side,
    disconnected_cut,
    min_degree,
    validate_cut,
)
from .isolating import cluster_isolating_cuts
from .matching import BipartiteInstance
from .minnncc import MinnnccCfg, min_nncc, minnncc_sample_size
from .seeds import derive_seed, rng_for


@dataclass(frozen=True)
class SolverConfig:
    boost: int | None = None  # single-sink repetitions; default scales with log n
    max_sinks: int | None = None  # cap on sampled sinks in the global reduction
    small_cluster_enum: int = 4  # clusters this small are solved by enumeration
    cluster: ClusterCfg = field(default_factory=ClusterCfg)
    minnncc: MinnnccCfg = field(default_factory=MinnnccCfg)
    oracle_verify: bool = False  # CLI cross-checks answers against brute force

    def resolved_boost(self, n: int) -> int:
        if self.boost is not None:
            return self.boost
        return max(2, math.ceil(math.log2(max(n, 2))) - 1)

    def resolved_sinks(self, n: int, delta: int) -> int:
        if self.max_sinks is not None:
            return min(self.max_sinks, n)
        lg = math.ceil(math.log2(max(n, 2)))
        if n - delta >= n / 2:
            return min(4 * lg, n)
        return min(math.ceil(10 * n * lg / max(n - delta, 1)), n)

    def terminal_prob(self, n: int, ell: int) -> float:
        lg = math.log2(max(n, 2))
        p = 1.0 / (ell * 2.0 ** math.ceil(lg**0.8))
        return min(1.0, max(1.0 / n, p))


def _best_subset_side(g: Graph, cluster) -> tuple[frozenset[int], int]:
    """Exact min |N(L)| over non-empty subsets of a small cluster."""
    members = sorted(cluster)
    bits = g.adjacency_bits
    best: tuple[int, int, tuple[int, ...]] | None = None
    k = len(members)
    nbr_cache = [0] * (1 << k)
    mask_cache = [0] * (1 << k)
    for mask in range(1, 1 << k):
        low = mask & (-mask)
        idx = low.bit_length() - 1
        nbrs = nbr_cache[mask ^ low] | bits[members[idx]]
        lmask = mask_cache[mask ^ low] | (1 << members[idx])
        nbr_cache[mask] = nbrs
        mask_cache[mask] = lmask
        size = (nbrs & ~lmask).bit_count()
        key = (size, mask.bit_count(), tuple(members[i] for i in range(k) if mask >> i & 1))
        if best is None or key < best:
            best = key
    assert best is not None
    return frozenset(best[2]), best[0]


@dataclass
class _Candidate:
    side: frozenset[int]
    size: int
    provenance: dict


def _harvest_cluster(
    g: Graph,
    cluster: frozenset[int],
    ell: int,
    cfg: SolverConfig,
    seed: int,
    cache: dict,
) -> list[_Candidate]:
    out: list[_Candidate] = []
    if len(cluster) <= cfg.small_cluster_enum:
        key = ("enum", cluster)
        if key not in cache:
            cache[key] = _best_subset_side(g, cluster)
        side, size = cache[key]
        return [_Candidate(side, size, {"method": "enum", "cluster_size": len(cluster)})]

    # Both solvers read only cluster-incident edges, so passing g is
    # equivalent to materializing the cluster-incident subgraph.
    full_sample = minnncc_sample_size(cfg.minnncc, g.n, len(cluster), ell) >= len(cluster)
    mkey = ("minnncc-full", cluster) if full_sample else ("minnncc", cluster, ell, seed)
    if mkey not in cache:
        cache[mkey] = min_nncc(g, cluster, ell, cfg.minnncc, seed=derive_seed(seed, "mnc"))
    side, size = cache[mkey]
    out.append(_Candidate(side, size, {"method": "minnncc", "cluster_size": len(cluster)}))

    rng = rng_for(seed, "terminals")
    prob = cfg.terminal_prob(g.n, ell)
    sample = [v for v in sorted(cluster) if rng.random() < prob]
    terminals: list[int] = []
    for v in sample:  # prune to an independent set, dropping higher ids
        if not any(g.has_edge(v, u) for u in terminals):
            terminals.append(v)
    if len(terminals) >= 2:
        ikey = ("iso", cluster, tuple(terminals))
        if ikey not in cache:
            cache[ikey] = cluster_isolating_cuts(g, cluster, terminals)
        got = cache[ikey]
        if got is not None:
            side, size = got
            out.append(
                _Candidate(
                    side,
                    size,
                    {"method": "isolating", "cluster_size": len(cluster), "terminals": len(terminals)},
                )
            )
    return out


def _ssvc_impl(g: Graph, t: int, cfg: SolverConfig, seed: int, cache: dict) -> tuple[VertexCut, dict]:
    if not 0 <= t < g.n:
        raise ValueError(f"sink {t} out of range")
    if not g.is_connected():
        cut = disconnected_cut(g, avoid=t)
        return cut, {"method": "disconnected"}
    pool = frozenset(range(g.n)) - g.closed_neighbors(t)
    if not pool:
        return VertexCut.degenerate(g.n), {"method": "dominating-sink"}

    levels = math.ceil(math.log2(max(g.n, 2))) + 1
    best: tuple[int, tuple[int, ...], frozenset[int], dict] | None = None
    for b in range(cfg.resolved_boost(g.n)):
        for i in range(levels):
            ell = 2**i
            cover_ell = min(2 * ell, g.n - 1)
            run_seed = derive_seed(seed, "round", b, i)
            cover = com_nei_clustering(g, cover_ell, cfg.cluster, run_seed)
            trimmed = {c - g.closed_neighbors(t) for c in cover.clusters}
            trimmed.discard(frozenset())
            for cluster in sorted(trimmed, key=lambda c: (len(c), sorted(c))):
                if len(cluster) <= cfg.small_cluster_enum:
                    cseed = 0  # enumeration is deterministic; no seed needed
                else:
                    cseed = derive_seed(run_seed, "cluster", tuple(sorted(cluster)))
                for cand in _harvest_cluster(g, cluster, ell, cfg, cseed, cache):
                    key = (cand.size, tuple(sorted(g.set_neighborhood(cand.side))))
                    if best is None or key < (best[0], best[1]):
                        prov = dict(cand.provenance, boost=b, level=i)
                        best = (cand.size, key[1], cand.side, prov)
    assert best is not None, "non-empty pool always yields candidates"
    cut = cut_from_side(g, best[2])
    assert validate_cut(g, cut) and t in cut.R
    return cut, best[3]


def ssvc(g: Graph, t: int, cfg: SolverConfig | None = None, seed: int = 0) -> VertexCut:
    """Minimum t-sink vertex cut (Monte Carlo; boosted)."""
    cut, _ = ssvc_report(g, t, cfg, seed)
    return cut


def ssvc_report(
    g: Graph, t: int, cfg: SolverConfig | None = None, seed: int = 0, cache: dict | None = None
) -> tuple[VertexCut, dict]:
    return _ssvc_impl(g, t, cfg or SolverConfig(), seed, {} if cache is None else cache)


def global_vc(g: Graph, cfg: SolverConfig | None = None, seed: int = 0) -> VertexCut:
    """Global minimum vertex cut via sampled single-sink runs."""
    cut, _ = global_vc_report(g, cfg, seed)
    return cut


def global_vc_report(g: Graph, cfg: SolverConfig | None = None, seed: int = 0) -> tuple[VertexCut, dict]:
    cfg = cfg or SolverConfig()
    if g.n < 2:
        raise ValueError("need at least two vertices")
    if not g.is_connected():
        cut = disconnected_cut(g)
        return cut, {"method": "disconnected"}
    v_min, delta = min_degree(g)
    if delta == g.n - 1:
        return VertexCut.degenerate(g.n), {"method": "complete"}
    fallback = cut_from_side(g, frozenset({v_min}))
    best = (fallback.size, tuple(sorted(fallback.S)), fallback, {"method": "min-degree", "vertex": v_min})
    z = cfg.resolved_sinks(g.n, delta)
    sinks = rng_for(seed, "sinks").sample(range(g.n), z)
    cache: dict = {}
    for idx, sink in enumerate(sinks):
        cut, prov = ssvc_report(g, sink, cfg, derive_seed(seed, "sink", idx), cache=cache)
        key = (cut.size, tuple(sorted(cut.S)))
        if key < best[:2]:
            best = (cut.size, key[1], cut, dict(prov, sink=sink))
    cut = best[2]
    assert validate_cut(g, cut)
    assert cut.size <= delta
    return cut, dict(best[3], sinks_tried=z, min_degree=delta)


def bmc_via_vc(
    inst: BipartiteInstance, cfg: SolverConfig | None = None, seed: int = 0
) -> tuple[frozenset[int], frozenset[int]]:
    """Minimum vertex cover of a bipartite graph through global vertex
    connectivity: complete both sides into cliques, cut the result, and fall
    back to the smaller side when the cut is no smaller."""
    if not inst.is_unit():
        raise ValueError("bmc_via_vc requires unit capacities")
    nl, nr = inst.n_left, inst.n_right
    if nl == 0 or nr == 0 or not inst.edges:
        return frozenset(), frozenset()
    edges = [(u, nl + v) for u, v in inst.edges]
    edges += [(a, b) for a in range(nl) for b in range(a + 1, nl)]
    edges += [(nl + a, nl + b) for a in range(nr) for b in range(a + 1, nr)]
    g = Graph.from_edges(nl + nr, edges)
    cut = global_vc(g, cfg, seed)
    if cut.size < min(nl, nr):
        return (
            frozenset(v for v in cut.S if v < nl),
            frozenset(v - nl for v in cut.S if v >= nl),
        )
    if nl <= nr:
        return frozenset(range(nl)), frozenset()
    return frozenset(), frozenset(range(nr))
