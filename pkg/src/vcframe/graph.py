"""Simple undirected graphs, vertex cuts, and the edge-list file format.

Vertex ids are dense 0-based integers. Graphs are immutable after
construction and safe to share across concurrent solver instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .seeds import rng_for


class GraphFormatError(ValueError):
    """Malformed edge-list input (bad tokens, self-loops, bad header)."""


class GraphRangeError(ValueError):
    """Vertex id outside the declared range."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with per-vertex sorted neighbor tuples.

    Invariants: no self-loops, no parallel edges, symmetric adjacency,
    ids dense in [0, n).
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_edges(n: int, edges) -> "Graph":
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphRangeError(f"edge ({u},{v}) out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return Graph(n, tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    @cached_property
    def adjacency_bits(self) -> tuple[int, ...]:
        """Neighbor sets as bitmasks; used by performance-sensitive loops."""
        out = []
        for a in self.adjacency:
            mask = 0
            for v in a:
                mask |= 1 << v
            out.append(mask)
        return tuple(out)

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def neighbors(self, u: int) -> frozenset[int]:
        return self.neighbor_sets[u]

    def closed_neighbors(self, u: int) -> frozenset[int]:
        return self.neighbor_sets[u] | {u}

    def set_neighborhood(self, vs) -> frozenset[int]:
        """N(V'): neighbors of the set, excluding the set itself."""
        vs = frozenset(vs)
        out: set[int] = set()
        for u in vs:
            out.update(self.adjacency[u])
        return frozenset(out - vs)

    def edges(self):
        for u in range(self.n):
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, v)

    def component_of(self, start: int, removed=frozenset()) -> frozenset[int]:
        """Connected component of `start` in G - removed."""
        if start in removed:
            raise ValueError("start vertex was removed")
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in self.adjacency[u]:
                if v not in removed and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return frozenset(seen)

    def components(self, removed=frozenset()) -> list[frozenset[int]]:
        removed = frozenset(removed)
        assigned: set[int] = set()
        comps = []
        for u in range(self.n):
            if u in removed or u in assigned:
                continue
            comp = self.component_of(u, removed)
            comps.append(comp)
            assigned.update(comp)
        return comps

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        return len(self.component_of(0)) == self.n


@dataclass(frozen=True)
class VertexCut:
    """A vertex cut: proper partition (L, S, R) or the degenerate |S|=n-1 case.

    Proper cuts require L and R non-empty with no L-R edges; S may be empty
    (disconnected graphs have cuts of size 0). The degenerate case encodes
    the no-separator convention where connectivity is n-1.
    """

    kind: str  # "proper" | "degenerate"
    L: frozenset[int] = frozenset()
    S: frozenset[int] = frozenset()
    R: frozenset[int] = frozenset()

    @property
    def size(self) -> int:
        return len(self.S)

    @staticmethod
    def proper(L, S, R) -> "VertexCut":
        return VertexCut("proper", frozenset(L), frozenset(S), frozenset(R))

    @staticmethod
    def degenerate(n: int) -> "VertexCut":
        # Any n-1 vertices act as the separator; pin {1, ..., n-1}.
        return VertexCut("degenerate", frozenset(), frozenset(range(1, n)), frozenset())

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "L": sorted(self.L),
            "S": sorted(self.S),
            "R": sorted(self.R),
            "size": self.size,
        }


def cut_violations(g: Graph, cut: VertexCut) -> list[str]:
    """Clauses of the cut definition violated by `cut` against `g` (empty if valid)."""
    vs = cut.L | cut.S | cut.R
    bad = []
    if not vs <= frozenset(range(g.n)):
        bad.append("vertex ids outside graph")
        return bad
    if cut.kind == "degenerate":
        if len(cut.S) != g.n - 1:
            bad.append(f"degenerate cut needs |S| = n-1, got {len(cut.S)}")
        if cut.L or cut.R:
            bad.append("degenerate cut must have empty L and R")
        return bad
    if cut.kind != "proper":
        return [f"unknown cut kind {cut.kind!r}"]
    if len(cut.L) + len(cut.S) + len(cut.R) != len(vs):
        bad.append("L, S, R overlap")
    if vs != frozenset(range(g.n)):
        bad.append("L, S, R do not partition V")
    if not cut.L:
        bad.append("L is empty")
    if not cut.R:
        bad.append("R is empty")
    for u in cut.L:
        if g.neighbor_sets[u] & cut.R:
            bad.append("an edge crosses L-R")
            break
    return bad


def validate_cut(g: Graph, cut: VertexCut) -> bool:
    """True iff `cut` satisfies the proper-cut invariants or is degenerate with |S|=n-1."""
    return not cut_violations(g, cut)


def cut_from_side(g: Graph, L) -> VertexCut:
    """The proper cut (L, N(L), rest) induced by a non-empty side L."""
    L = frozenset(L)
    if not L:
        raise ValueError("L must be non-empty")
    S = g.set_neighborhood(L)
    R = frozenset(range(g.n)) - L - S
    return VertexCut.proper(L, S, R)


def disconnected_cut(g: Graph, avoid: int | None = None) -> VertexCut:
    """A size-0 cut of a disconnected graph; L avoids `avoid` when given."""
    comps = g.components()
    if len(comps) < 2:
        raise ValueError("graph is connected")
    for comp in comps:
        if avoid is None or avoid not in comp:
            return cut_from_side(g, comp)
    raise AssertionError("unreachable: some component avoids the vertex")


def load_graph(text: str) -> Graph:
    """Parse an edge-list document.

    Lines are "u v" pairs of 0-based ids; an optional first header line
    "p <n> <m>" declares the vertex count. Blank lines and lines starting
    with '#' are skipped. Duplicate edges collapse; self-loops are errors.
    """
    declared_n: int | None = None
    edges: list[tuple[int, int]] = []
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if declared_n is not None or edges:
                raise GraphFormatError(f"line {lineno}: header must be the first content line")
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: header must be 'p <n> <m>'")
            try:
                declared_n = int(parts[1])
                int(parts[2])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer header field") from None
            if declared_n < 0:
                raise GraphFormatError(f"line {lineno}: negative vertex count")
            continue
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex id") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative vertex id")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop {u} {u} not allowed")
        if declared_n is not None and (u >= declared_n or v >= declared_n):
            raise GraphRangeError(f"line {lineno}: id >= declared n={declared_n}")
        edges.append((u, v))
        max_id = max(max_id, u, v)
    n = declared_n if declared_n is not None else max_id + 1
    return Graph.from_edges(n, edges)


def dump_edge_list(g: Graph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def neighborhood_difference(g: Graph, u: int, v: int) -> int:
    """|N(u) symmetric-difference N(v)|, by merging the sorted adjacency lists."""
    if u == v:
        raise ValueError("neighborhood difference needs two distinct vertices")
    a, b = g.adjacency[u], g.adjacency[v]
    i = j = diff = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            i += 1
            j += 1
        elif a[i] < b[j]:
            diff += 1
            i += 1
        else:
            diff += 1
            j += 1
    return diff + (len(a) - i) + (len(b) - j)


def min_degree(g: Graph) -> tuple[int, int]:
    """A minimum-degree vertex and its degree; ties go to the smallest id."""
    if g.n < 1:
        raise ValueError("empty graph has no minimum degree")
    best = min(range(g.n), key=lambda u: (len(g.adjacency[u]), u))
    return best, len(g.adjacency[best])


def incident_subgraph(g: Graph, core) -> Graph:
    """Subgraph (on the same vertex ids) keeping only edges with an endpoint in `core`."""
    core = frozenset(core)
    edges = []
    for u in core:
        for v in g.adjacency[u]:
            if v not in core or u < v:
                edges.append((u, v))
    return Graph.from_edges(g.n, edges)


def gnp_random_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p) with deterministic seeding."""
    rng = rng_for(seed, "gnp", n, p)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)
