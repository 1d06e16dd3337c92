"""Bipartite maximum matching, Kőnig covers, and vertex connectivity via matching.

The s-t and (A,B) vertex-connectivity solvers build the classic bipartite
construction (copies of V minus each side, an edge for adjacency-or-equality,
unbounded capacity on the opposite side's copies) and read the minimum
separator off a minimum vertex cover. Unbounded capacities are realized by
duplicating a vertex degree+1 times, which is behaviorally equivalent to the
capacity-n encoding: a matching never uses more copies than the degree, and
the spare copy keeps such vertices out of the Kőnig cover whenever possible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graph import Graph, VertexCut

UNBOUNDED = -1


@dataclass(frozen=True)
class BipartiteInstance:
    """Bipartite graph with per-vertex capacities (1 or UNBOUNDED)."""

    n_left: int
    n_right: int
    edges: tuple[tuple[int, int], ...]
    left_caps: tuple[int, ...] | None = None
    right_caps: tuple[int, ...] | None = None

    def is_unit(self) -> bool:
        return self.left_caps is None and self.right_caps is None


@dataclass(frozen=True)
class MatchingResult:
    matching: tuple[tuple[int, int], ...]
    cover_left: frozenset[int]
    cover_right: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.matching)

    @property
    def cover_size(self) -> int:
        return len(self.cover_left) + len(self.cover_right)


@dataclass(frozen=True)
class SeparatorResult:
    kappa: int
    separator: frozenset[int]
    cut: VertexCut


def max_bipartite_matching(inst: BipartiteInstance) -> MatchingResult:
    """Hopcroft-Karp maximum matching plus the Kőnig minimum vertex cover.

    Requires unit capacities; expand unbounded vertices first. Vertices are
    processed in id order so results are deterministic.
    """
    if not inst.is_unit():
        raise ValueError("max_bipartite_matching requires unit capacities")
    nl, nr = inst.n_left, inst.n_right
    adj: list[list[int]] = [[] for _ in range(nl)]
    for u, v in inst.edges:
        if not (0 <= u < nl and 0 <= v < nr):
            raise ValueError(f"edge ({u},{v}) out of range")
        adj[u].append(v)
    for row in adj:
        row.sort()
    INF = nl + nr + 1
    pair_l = [-1] * nl
    pair_r = [-1] * nr
    dist = [0] * nl

    def bfs() -> bool:
        q = deque()
        for u in range(nl):
            if pair_l[u] == -1:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = INF
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = pair_r[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    iters = [0] * nl

    def dfs(root: int) -> bool:
        # Iterative layered DFS; augments one path or exhausts `root`.
        stack = [root]
        while stack:
            u = stack[-1]
            advanced = False
            while iters[u] < len(adj[u]):
                v = adj[u][iters[u]]
                iters[u] += 1
                w = pair_r[v]
                if w == -1:
                    # Augment along the stack.
                    stack.append(v)
                    for i in range(len(stack) - 1, 0, -2):
                        pair_l[stack[i - 1]] = stack[i]
                        pair_r[stack[i]] = stack[i - 1]
                    return True
                if dist[w] == dist[u] + 1:
                    stack.append(v)
                    stack.append(w)
                    advanced = True
                    break
            if not advanced:
                dist[u] = INF
                stack.pop()
                if stack:
                    stack.pop()  # drop the right vertex that led here
        return False

    while bfs():
        iters = [0] * nl
        for u in range(nl):
            if pair_l[u] == -1:
                dfs(u)

    # Kőnig: alternating reachability from unmatched left vertices.
    seen_l = [False] * nl
    seen_r = [False] * nr
    q = deque(u for u in range(nl) if pair_l[u] == -1)
    for u in q:
        seen_l[u] = True
    while q:
        u = q.popleft()
        for v in adj[u]:
            if pair_l[u] == v or seen_r[v]:
                continue
            seen_r[v] = True
            w = pair_r[v]
            if w != -1 and not seen_l[w]:
                seen_l[w] = True
                q.append(w)
    cover_left = frozenset(u for u in range(nl) if not seen_l[u])
    cover_right = frozenset(v for v in range(nr) if seen_r[v])
    matching = tuple((u, pair_l[u]) for u in range(nl) if pair_l[u] != -1)
    result = MatchingResult(matching, cover_left, cover_right)
    assert result.cover_size == result.size, "Kőnig cover size mismatch"
    return result


def expand_capacities(inst: BipartiteInstance) -> tuple[BipartiteInstance, list[int], list[int]]:
    """Duplicate UNBOUNDED vertices degree+1 times; returns unit instance plus
    copy-to-original maps for both sides."""
    deg_l = [0] * inst.n_left
    deg_r = [0] * inst.n_right
    for u, v in inst.edges:
        deg_l[u] += 1
        deg_r[v] += 1

    def copies(caps, n, deg):
        owner: list[int] = []
        first: list[int] = []
        count: list[int] = []
        for v in range(n):
            first.append(len(owner))
            cap = 1 if caps is None else caps[v]
            count.append(1 if cap == 1 else deg[v] + 1)
            owner.extend([v] * count[-1])
        return owner, first, count

    owner_l, first_l, count_l = copies(inst.left_caps, inst.n_left, deg_l)
    owner_r, first_r, count_r = copies(inst.right_caps, inst.n_right, deg_r)
    edges = []
    for u, v in inst.edges:
        for cu in range(first_l[u], first_l[u] + count_l[u]):
            for cv in range(first_r[v], first_r[v] + count_r[v]):
                edges.append((cu, cv))
    unit = BipartiteInstance(len(owner_l), len(owner_r), tuple(edges))
    return unit, owner_l, owner_r


def _schrijver_separator(g: Graph, A: frozenset[int], B: frozenset[int]) -> frozenset[int]:
    """Minimum (A,B)-separator from a minimum vertex cover of the bipartite
    construction; assumes no A-B edge."""
    left_ids = [v for v in range(g.n) if v not in A]  # copies of V - A
    right_ids = [v for v in range(g.n) if v not in B]  # copies of V - B
    lpos = {v: i for i, v in enumerate(left_ids)}
    rpos = {v: i for i, v in enumerate(right_ids)}
    edges = []
    for u in left_ids:
        if u in rpos:
            edges.append((lpos[u], rpos[u]))
        for v in g.adjacency[u]:
            if v in rpos:
                edges.append((lpos[u], rpos[v]))
    left_caps = tuple(UNBOUNDED if v in B else 1 for v in left_ids)
    right_caps = tuple(UNBOUNDED if v in A else 1 for v in right_ids)
    inst = BipartiteInstance(len(left_ids), len(right_ids), tuple(edges), left_caps, right_caps)
    unit, owner_l, owner_r = expand_capacities(inst)
    res = max_bipartite_matching(unit)
    W = {left_ids[owner_l[c]] for c in res.cover_left}
    U = {right_ids[owner_r[c]] for c in res.cover_right}
    return frozenset((U & A) | (U & W) | (W & B))


def _cut_from_separator(g: Graph, A: frozenset[int], sep: frozenset[int]) -> VertexCut:
    L: set[int] = set()
    for a in A:
        L.update(g.component_of(a, sep))
    Lf = frozenset(L)
    R = frozenset(range(g.n)) - Lf - sep
    return VertexCut.proper(Lf, sep, R)


def st_vertex_connectivity(g: Graph, s: int, t: int) -> SeparatorResult:
    """kappa(s, t) with a minimum separator, via bipartite minimum vertex cover.

    Adjacent endpoints have no separator: returns the degenerate n-1 answer.
    """
    if s == t:
        raise ValueError("s and t must differ")
    if g.has_edge(s, t):
        return SeparatorResult(g.n - 1, VertexCut.degenerate(g.n).S, VertexCut.degenerate(g.n))
    sep = _schrijver_separator(g, frozenset({s}), frozenset({t}))
    cut = _cut_from_separator(g, frozenset({s}), sep)
    assert t in cut.R, "separator does not shield t"
    return SeparatorResult(len(sep), sep, cut)


def set_vertex_connectivity(g: Graph, sources, sinks) -> SeparatorResult:
    """Minimum (A,B)-separator via the same construction with general sides."""
    A, B = frozenset(sources), frozenset(sinks)
    if not A or not B:
        raise ValueError("both sides must be non-empty")
    if A & B:
        raise ValueError("sides must be disjoint")
    if any(g.neighbor_sets[a] & B for a in A):
        return SeparatorResult(g.n - 1, VertexCut.degenerate(g.n).S, VertexCut.degenerate(g.n))
    sep = _schrijver_separator(g, A, B)
    cut = _cut_from_separator(g, A, sep)
    assert B <= cut.R, "separator does not shield the sink side"
    return SeparatorResult(len(sep), sep, cut)


def greedy_maximal_matching(a_vertices, b_vertices, adj) -> list[tuple[int, int]]:
    """Greedy maximal matching in id order; adj maps a-vertex to iterable of b's."""
    used_b: set = set()
    out = []
    for a in sorted(a_vertices):
        for b in sorted(adj.get(a, ())):
            if b in b_vertices and b not in used_b:
                used_b.add(b)
                out.append((a, b))
                break
    return out


def repeat_matching_rounds(n: int) -> int:
    """Default round count for the maximal-matching peeling reduction."""
    return 3 * max(1, (max(n, 2) - 1).bit_length()) + 1


def repeat_matching_reduce(a_vertices, b_vertices, edges, rounds: int | None = None) -> frozenset:
    """Peel maximal matchings to find D within B preserving maximum matching size.

    After the returned rounds, the bipartite graph restricted to A and D has
    the same maximum matching size as the one on A and B.
    """
    A = frozenset(a_vertices)
    B = frozenset(b_vertices)
    if len(A) > len(B):
        raise ValueError("caller contract violation: need |A| <= |B|")
    adj: dict = {}
    for a, b in edges:
        if a not in A or b not in B:
            raise ValueError(f"edge ({a},{b}) leaves the bipartition")
        adj.setdefault(a, set()).add(b)
    if rounds is None:
        rounds = repeat_matching_rounds(len(A) + len(B))
    D: set = set()
    remaining = set(B)
    for _ in range(rounds):
        matched = greedy_maximal_matching(A, remaining, adj)
        if not matched:
            break
        for _, b in matched:
            D.add(b)
            remaining.discard(b)
    return frozenset(D)
