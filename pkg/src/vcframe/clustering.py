"""Common-neighborhood clustering: decompose the vertex set into overlapping
clusters that are sparse per vertex, have bounded pairwise neighborhood
difference, and cover any connected low-difference set with useful probability.

The driver runs a double loop over a distance scale d (geometric in i) and a
center-sampling rate 1/s (s = 2^j). Within each (i, j) iteration it
alternates two growth phases over a shrinking partition of V: marked vertex
centers absorb adjacent partition pieces whose representative is close in
neighborhood difference (those territories are the recorded clusters), then
marked pieces absorb their neighbors to contract the partition for the next
round. Pieces recorded in one iteration are pairwise disjoint, which yields
the per-vertex sparsity bound.

The asymptotic exponents in the schedules (log^0.1, log^0.8, log^0.9 powers)
are replaced by non-degenerate desk-scale defaults; every knob is in
ClusterCfg.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

from .graph import Graph, neighborhood_difference
from .seeds import derive_seed, rng_for
from .sketch import ApproxCfg, approx_diff_estimate, build_approx_sketch


def _log2(n: int) -> float:
    return math.log2(max(n, 2))


@dataclass(frozen=True)
class ClusterCfg:
    """Desk-scale schedules for the clustering loops; None fields derive from n."""

    i_max: int | None = None  # outer distance-scale loop bound
    j_max: int | None = None  # sampling-rate loop bound (s = 2^j)
    t1_max: int | None = None  # contraction rounds per (i, j)
    t2_cap: int | None = None  # growth passes per phase
    center_prob: float | None = None  # piece-center probability in the contraction phase
    boost: int | None = None  # independent runs whose clusters are unioned
    diff_backend: str = "exact"  # "exact" | "sketched"
    approx: ApproxCfg = field(default_factory=ApproxCfg)

    def resolved(self, n: int) -> "ResolvedClusterCfg":
        lg = _log2(n)
        i_max = self.i_max if self.i_max is not None else math.ceil(_log2(math.ceil(lg))) + 2
        j_max = self.j_max if self.j_max is not None else math.ceil(lg)
        t1_max = self.t1_max if self.t1_max is not None else math.ceil(lg**0.3)
        t2_cap = self.t2_cap if self.t2_cap is not None else n
        prob = self.center_prob if self.center_prob is not None else max(1.0 / n, 2.0 ** -math.ceil(lg**0.8))
        boost = self.boost if self.boost is not None else math.ceil(lg**2)
        if not 0.0 < prob <= 1.0:
            raise ValueError("piece-center probability must lie in (0, 1]")
        return ResolvedClusterCfg(n, i_max, j_max, t1_max, t2_cap, prob, boost, self.diff_backend, self.approx)


@dataclass(frozen=True)
class ResolvedClusterCfg:
    n: int
    i_max: int
    j_max: int
    t1_max: int
    t2_cap: int
    center_prob: float
    boost: int
    diff_backend: str
    approx: ApproxCfg

    def scale(self, i: int, ell: int) -> float:
        return 2.0 ** (i * math.sqrt(_log2(self.n))) * ell

    def iteration_cap(self, i: int, t1: int, ell: int) -> float:
        """Neighborhood-difference bound for clusters recorded at (i, *, t1).

        Follows the growth induction: pieces carry difference 9^t1*d/3, and a
        recorded territory adds two piece-internal hops plus two accepted
        closeness checks. The sketched backend widens checks by the 1.1
        estimator slack.
        """
        slack = 1.0 if self.diff_backend == "exact" else 1.25
        return (2.0 / 3.0 + 2.0 * slack) * 9.0**t1 * self.scale(i, ell)

    def diff_cap(self, ell: int) -> float:
        return 9.0 ** (self.t1_max + 1) * self.scale(self.i_max, ell)

    @property
    def iteration_count(self) -> int:
        return (self.i_max + 1) * (self.j_max + 1) * (self.t1_max + 1)


@dataclass(frozen=True)
class ClusterCover:
    """Recorded clusters with their (i, j, t1) iteration tags."""

    n: int
    ell: int
    seed: int
    clusters: tuple[frozenset[int], ...]
    tags: tuple[tuple[int, int, int], ...]
    params: ResolvedClusterCfg

    @cached_property
    def membership_index(self) -> dict[int, tuple[int, ...]]:
        index: dict[int, list[int]] = {}
        for ci, cluster in enumerate(self.clusters):
            for v in cluster:
                index.setdefault(v, []).append(ci)
        return {v: tuple(cs) for v, cs in index.items()}

    def max_multiplicity(self) -> int:
        if not self.clusters:
            return 0
        return max((len(cs) for cs in self.membership_index.values()), default=0)

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "seed": self.seed,
            "cluster_count": len(self.clusters),
            "clusters": [sorted(c) for c in self.clusters],
            "tags": [list(t) for t in self.tags],
        }


class _DiffOracle:
    """Pairwise neighborhood-difference values with memoization.

    The exact backend uses bitmask popcounts (equal to the merge-based
    graph operation; asserted in tests). The sketched backend recovers
    estimates from per-vertex approximate sketches.
    """

    def __init__(self, g: Graph, backend: str, seed: int, approx: ApproxCfg):
        self.g = g
        self.backend = backend
        self.cache: dict[tuple[int, int], int] = {}
        if backend == "sketched":
            self._sk = [build_approx_sketch(g.neighbor_sets[u], seed, g.n, approx) for u in range(g.n)]
        elif backend != "exact":
            raise ValueError(f"unknown diff backend {backend!r}")

    def __call__(self, u: int, v: int) -> int:
        if u == v:
            return 0
        key = (u, v) if u < v else (v, u)
        got = self.cache.get(key)
        if got is None:
            if self.backend == "exact":
                bits = self.g.adjacency_bits
                got = (bits[u] ^ bits[v]).bit_count()
            else:
                got = approx_diff_estimate(self._sk[u], self._sk[v])
            self.cache[key] = got
        return got


class _Partition:
    """Disjoint vertex pieces with O(1) piece-of lookup and min-id representatives."""

    def __init__(self, n: int):
        self.members: list[list[int]] = [[v] for v in range(n)]
        self.rep: list[int] = list(range(n))
        self.piece_of: list[int] = list(range(n))
        self.alive: list[bool] = [True] * n

    @classmethod
    def from_pieces(cls, n: int, pieces: list[list[int]]) -> "_Partition":
        part = cls.__new__(cls)
        part.members = [list(p) for p in pieces]
        part.rep = [min(p) for p in pieces]
        part.piece_of = [-1] * n
        for pid, p in enumerate(pieces):
            for v in p:
                part.piece_of[v] = pid
        part.alive = [True] * len(pieces)
        return part

    def piece_ids(self) -> list[int]:
        return [pid for pid in range(len(self.members)) if self.alive[pid]]


def _grow_territories(
    g: Graph,
    part: _Partition,
    seeds: list[tuple[int, int]],  # (anchor vertex, seed piece id), claimed in order
    diff,
    thr: float,
    t2_cap: int,
) -> list[tuple[int, list[int]]]:
    """Absorb adjacent alive pieces whose representative is thr-close to the anchor.

    Claims seed pieces in the given order (later anchors whose seed piece is
    already claimed are skipped), then grows every territory in passes until
    stable. Returns (anchor, territory vertices) for each active anchor.
    """
    territories: list[tuple[int, list[int], list[int]]] = []  # anchor, members, frontier
    for anchor, pid in seeds:
        if pid < 0 or not part.alive[pid]:
            continue
        part.alive[pid] = False
        members = list(part.members[pid])
        territories.append((anchor, members, list(members)))
    rejected: list[set[int]] = [set() for _ in territories]
    for _ in range(max(1, t2_cap)):
        changed = False
        for ti, (anchor, members, frontier) in enumerate(territories):
            if not frontier:
                continue
            new_frontier: list[int] = []
            while frontier:
                w = frontier.pop()
                for x in g.adjacency[w]:
                    pid = part.piece_of[x]
                    if pid < 0 or not part.alive[pid] or pid in rejected[ti]:
                        continue
                    if diff(anchor, part.rep[pid]) <= thr:
                        part.alive[pid] = False
                        members.extend(part.members[pid])
                        new_frontier.extend(part.members[pid])
                        changed = True
                    else:
                        rejected[ti].add(pid)
            frontier.extend(new_frontier)
        if not changed:
            break
    return [(anchor, members) for anchor, members, _ in territories]


def com_nei_clustering(g: Graph, ell: int, cfg: ClusterCfg | None = None, seed: int = 0) -> ClusterCover:
    """One clustering run over the full (i, j, t1) schedule."""
    if not 1 <= ell < max(g.n, 2):
        raise ValueError(f"ell must satisfy 1 <= ell < n, got ell={ell}, n={g.n}")
    cfg = cfg or ClusterCfg()
    rc = cfg.resolved(g.n)
    diff = _DiffOracle(g, rc.diff_backend, derive_seed(seed, "diff"), rc.approx)
    clusters: list[frozenset[int]] = []
    tags: list[tuple[int, int, int]] = []
    for i in range(rc.i_max + 1):
        d = rc.scale(i, ell)
        # Beyond the first scale where even t1=0 accepts any possible
        # difference (<= 2n), every closeness check degenerates to "accept",
        # so further i values only replay the same behavior.
        if i > 0 and rc.scale(i - 1, ell) >= 2 * g.n:
            break
        for j in range(rc.j_max + 1):
            rng = rng_for(seed, "iter", i, j)
            s = 2**j
            vertex_centers = [u for u in range(g.n) if rng.random() < 1.0 / s]
            part = _Partition(g.n)
            for t1 in range(rc.t1_max + 1):
                thr = 9.0**t1 * d
                # Recording phase: vertex centers grow territories over a copy.
                snapshot = _Partition.from_pieces(g.n, [part.members[pid] for pid in part.piece_ids()])
                seeds = [(u, snapshot.piece_of[u]) for u in vertex_centers]
                for anchor, members in _grow_territories(g, snapshot, seeds, diff, thr, rc.t2_cap):
                    clusters.append(frozenset(members))
                    tags.append((i, j, t1))
                # Contraction phase: piece centers absorb neighbors; survivors form P.
                piece_ids = part.piece_ids()
                center_pieces = [pid for pid in piece_ids if rng.random() < rc.center_prob]
                seeds = [(part.rep[pid], pid) for pid in center_pieces]
                grown = _grow_territories(g, part, seeds, diff, thr, rc.t2_cap)
                if not grown:
                    break
                part = _Partition.from_pieces(g.n, [members for _, members in grown])
    return ClusterCover(g.n, ell, seed, tuple(clusters), tuple(tags), rc)


def boosted_cover(g: Graph, ell: int, cfg: ClusterCfg | None = None, seed: int = 0, boost: int | None = None) -> ClusterCover:
    """Union of `boost` independent clustering runs (seeds derived in order)."""
    cfg = cfg or ClusterCfg()
    rc = cfg.resolved(g.n)
    rounds = boost if boost is not None else rc.boost
    clusters: list[frozenset[int]] = []
    tags: list[tuple[int, int, int]] = []
    for b in range(rounds):
        cover = com_nei_clustering(g, ell, cfg, derive_seed(seed, "boost", b))
        clusters.extend(cover.clusters)
        tags.extend(cover.tags)
    return ClusterCover(g.n, ell, seed, tuple(clusters), tuple(tags), rc)


@dataclass(frozen=True)
class CoverReport:
    precondition_ok: bool
    violation: str | None
    max_multiplicity: int
    max_cluster_diff: int
    contains_target: bool


def check_cover_properties(g: Graph, cover: ClusterCover, target) -> CoverReport:
    """Audit a cover against a candidate set: multiplicity, exact differences,
    and containment. Precondition failures are reported, not raised, so the
    statistical tests can tally them."""
    L = frozenset(target)
    violation = None
    if not L:
        violation = "target set is empty"
    elif not L <= frozenset(range(g.n)):
        violation = "target set leaves the graph"
    elif len(g.component_of(min(L), frozenset(range(g.n)) - L)) != len(L):
        violation = "target set is not connected"
    else:
        worst = max(
            (neighborhood_difference(g, u, v) for u in L for v in L if u < v),
            default=0,
        )
        if worst > cover.ell:
            violation = f"target neighborhood difference {worst} exceeds ell={cover.ell}"
    bits = g.adjacency_bits
    max_diff = 0
    for cluster in cover.clusters:
        members = sorted(cluster)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                max_diff = max(max_diff, (bits[members[a]] ^ bits[members[b]]).bit_count())
    contains = any(L <= c for c in cover.clusters) if violation is None else False
    return CoverReport(violation is None, violation, cover.max_multiplicity(), max_diff, contains)
