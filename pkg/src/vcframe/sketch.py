"""Linear sparse-recovery sketches over a prime field, and the approximate
symmetric-difference estimator built from nested coordinate samples.

A sketch holds, for each of `rows` hash rows, `buckets` cells of three field
elements (count, index-weighted sum, fingerprint). Any vector with at most
`s` nonzeros is recoverable by peeling 1-sparse cells; heavier vectors yield
bottom (None). Sketches are linear: cell-wise sums and differences of
sketches with matching (n, s, seed) are sketches of the summed or
subtracted vectors, so two parties sharing a public seed can combine
sketches of disjoint edge sets.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

from .graph import Graph, neighborhood_difference
from .seeds import rng_for


class IncompatibleSketchError(ValueError):
    """Sketches with different (n, s, seed) cannot be combined."""


def _is_prime(x: int) -> bool:
    # Deterministic Miller-Rabin for 64-bit inputs.
    if x < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if x % small == 0:
            return x == small
    d = x - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        y = pow(a, d, x)
        if y in (1, x - 1):
            continue
        for _ in range(r - 1):
            y = y * y % x
            if y == x - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def field_prime(n: int) -> int:
    """Smallest prime >= max(n, 4)^3; one field per dimension."""
    x = max(n, 4) ** 3
    while not _is_prime(x):
        x += 1
    return x


@lru_cache(maxsize=None)
def _row_params(n: int, s: int, seed: int, rows: int) -> tuple[tuple[int, int, int], ...]:
    p = field_prime(n)
    out = []
    for r in range(rows):
        rng = rng_for(seed, "sketch-row", n, s, r)
        a = rng.randrange(1, p)
        b = rng.randrange(0, p)
        z = rng.randrange(2, p)
        out.append((a, b, z))
    return tuple(out)


def default_rows(n: int) -> int:
    return max(6, (max(n, 2) - 1).bit_length())


@dataclass(frozen=True)
class LinearSketch:
    """s-sparse-recovery sketch of an integer vector over [0, n)."""

    n: int
    s: int
    seed: int
    rows: int
    buckets: int
    cells: tuple[dict[int, tuple[int, int, int]], ...]  # per row: bucket -> (S0, S1, S2)

    @property
    def p(self) -> int:
        return field_prime(self.n)

    def compatible(self, other: "LinearSketch") -> bool:
        return (self.n, self.s, self.seed, self.rows, self.buckets) == (
            other.n,
            other.s,
            other.seed,
            other.rows,
            other.buckets,
        )

    def serialized_bits(self) -> int:
        return 8 * len(self.to_bytes())

    def to_bytes(self) -> bytes:
        """Dense wire format: header plus a length-prefixed field-element array."""
        width = (self.p.bit_length() + 7) // 8
        head = struct.pack(
            "<4sQQQQQQ", b"sk01", self.n, self.s, self.seed, self.rows, self.buckets,
            3 * self.rows * self.buckets,
        )
        body = bytearray()
        for row in self.cells:
            for b in range(self.buckets):
                s0, s1, s2 = row.get(b, (0, 0, 0))
                for val in (s0, s1, s2):
                    body += val.to_bytes(width, "little")
        return head + bytes(body)


def _hash_bucket(a: int, b: int, p: int, buckets: int, i: int) -> int:
    return ((a * i + b) % p) % buckets


def build_sketch(indicator, s: int, seed: int, n: int) -> LinearSketch:
    """Sketch of the 0/1 indicator vector of `indicator` (a set of coordinates)."""
    return sketch_of_vector({i: 1 for i in indicator}, s, seed, n)


def sketch_of_vector(entries: dict[int, int], s: int, seed: int, n: int) -> LinearSketch:
    if s < 1:
        raise ValueError("sparsity budget must be >= 1")
    p = field_prime(n)
    rows = default_rows(n)
    buckets = 2 * s
    params = _row_params(n, s, seed, rows)
    cells: tuple[dict[int, tuple[int, int, int]], ...] = tuple({} for _ in range(rows))
    for i, val in entries.items():
        if not 0 <= i < n:
            raise ValueError(f"coordinate {i} outside [0, {n})")
        v = val % p
        if v == 0:
            continue
        for r, (a, b, z) in enumerate(params):
            bkt = _hash_bucket(a, b, p, buckets, i)
            s0, s1, s2 = cells[r].get(bkt, (0, 0, 0))
            cells[r][bkt] = ((s0 + v) % p, (s1 + v * i) % p, (s2 + v * pow(z, i, p)) % p)
    for row in cells:
        for bkt in [k for k, tri in row.items() if tri == (0, 0, 0)]:
            del row[bkt]
    return LinearSketch(n, s, seed, rows, buckets, cells)


def _combine(a: LinearSketch, b: LinearSketch, sign: int) -> LinearSketch:
    if not a.compatible(b):
        raise IncompatibleSketchError("sketch parameters (n, s, seed) differ")
    p = a.p
    cells = []
    for ra, rb in zip(a.cells, b.cells):
        row = dict(ra)
        for bkt, (s0, s1, s2) in rb.items():
            t0, t1, t2 = row.get(bkt, (0, 0, 0))
            tri = ((t0 + sign * s0) % p, (t1 + sign * s1) % p, (t2 + sign * s2) % p)
            if tri == (0, 0, 0):
                row.pop(bkt, None)
            else:
                row[bkt] = tri
        cells.append(row)
    return LinearSketch(a.n, a.s, a.seed, a.rows, a.buckets, tuple(cells))


def add(a: LinearSketch, b: LinearSketch) -> LinearSketch:
    return _combine(a, b, 1)


def subtract(a: LinearSketch, b: LinearSketch) -> LinearSketch:
    return _combine(a, b, -1)


def _center(v: int, p: int) -> int:
    return v if v <= p // 2 else v - p


def sparse_recover(sk: LinearSketch) -> dict[int, int] | None:
    """Recover the sketched vector if it has at most s nonzeros, else None.

    Peels 1-sparse cells (verified by fingerprint) and subtracts recovered
    coordinates from every row until the sketch is empty.
    """
    p = sk.p
    params = _row_params(sk.n, sk.s, sk.seed, sk.rows)
    # A row with more than s occupied buckets certifies more than s nonzeros.
    if any(len(row) > sk.s for row in sk.cells):
        return None
    work = [dict(row) for row in sk.cells]
    out: dict[int, int] = {}

    def try_extract() -> tuple[int, int] | None:
        for r, row in enumerate(work):
            _, _, z = params[r]
            for bkt, (s0, s1, s2) in row.items():
                if s0 == 0:
                    continue
                idx = s1 * pow(s0, p - 2, p) % p
                if idx >= sk.n:
                    continue
                if s2 != s0 * pow(z, idx, p) % p:
                    continue
                val = _center(s0, p)
                return int(idx), val
        return None

    while any(work_row for work_row in work):
        found = try_extract()
        if found is None:
            return None
        idx, val = found
        out[idx] = out.get(idx, 0) + val
        if len(out) > sk.s:
            return None
        v = val % p
        for r, (a, b, z) in enumerate(params):
            bkt = _hash_bucket(a, b, p, sk.buckets, idx)
            s0, s1, s2 = work[r].get(bkt, (0, 0, 0))
            tri = ((s0 - v) % p, (s1 - v * idx) % p, (s2 - v * pow(z, idx, p)) % p)
            if tri == (0, 0, 0):
                work[r].pop(bkt, None)
            else:
                work[r][bkt] = tri
    return {i: v for i, v in out.items() if v != 0}


@dataclass(frozen=True)
class ApproxCfg:
    """Knobs for the approximate-difference estimator."""

    trigger_c: int = 100  # trigger threshold is trigger_c * ceil(log2 n)
    sparsity_mult: int = 3  # per-level budget is sparsity_mult * threshold

    def threshold(self, n: int) -> int:
        return self.trigger_c * max(1, (max(n, 2) - 1).bit_length())

    def level_budget(self, n: int, level_size: int) -> int:
        return max(4, min(self.sparsity_mult * self.threshold(n), level_size))


@dataclass(frozen=True)
class ApproxDiffSketch:
    """Nested-sample sketches estimating the squared norm of a {-1,0,1} vector.

    Level i sketches the coordinates in the first min(2^i, n) positions of a
    seed-determined permutation; all levels share that permutation.
    """

    n: int
    seed: int
    cfg: ApproxCfg
    levels: tuple[LinearSketch, ...]

    def compatible(self, other: "ApproxDiffSketch") -> bool:
        return (self.n, self.seed, self.cfg) == (other.n, other.seed, other.cfg)


@lru_cache(maxsize=32)
def _sample_positions(n: int, seed: int) -> dict[int, int]:
    order = list(range(n))
    rng_for(seed, "apd-permutation", n).shuffle(order)
    return {coord: pos for pos, coord in enumerate(order)}


def _level_sizes(n: int) -> list[int]:
    sizes = []
    i = 1
    while True:
        sizes.append(min(2**i, n))
        if sizes[-1] == n:
            return sizes
        i += 1


def build_approx_sketch(indicator, seed: int, n: int, cfg: ApproxCfg = ApproxCfg()) -> ApproxDiffSketch:
    pos = _sample_positions(n, seed)
    members = sorted(indicator)
    levels = []
    for li, size in enumerate(_level_sizes(n)):
        entries = {pos[i]: 1 for i in members if pos[i] < size}
        budget = cfg.level_budget(n, size)
        levels.append(sketch_of_vector(entries, budget, rng_for(seed, "apd-level", li).randrange(2**31), size))
    return ApproxDiffSketch(n, seed, cfg, tuple(levels))


def approx_diff_estimate(a: ApproxDiffSketch, b: ApproxDiffSketch) -> int:
    """Estimate of the symmetric-difference size from two approx sketches.

    Uses the densest sampled level whose recovered count clears the trigger
    threshold (scaled by the sampling rate); small differences resolve
    exactly at the full-sample level. Returns 2n when every level overflows.
    """
    if not a.compatible(b):
        raise IncompatibleSketchError("approx sketches built with different parameters")
    n = a.n
    thr = a.cfg.threshold(n)
    sizes = _level_sizes(n)
    best: int | None = None
    for li in range(len(sizes) - 1, -1, -1):
        rec = sparse_recover(subtract(a.levels[li], b.levels[li]))
        if rec is None:
            continue
        count = sum(1 for v in rec.values() if v != 0)
        scaled = round(count * n / sizes[li])
        if sizes[li] == n and best is None:
            return count  # exact at the full level
        if count > thr:
            return scaled
        if best is None:
            best = scaled
    return best if best is not None else 2 * n


_APD_CACHE: dict[tuple[Graph, int, ApproxCfg], dict] = {}


def apd(g: Graph, u: int, v: int, mode: str = "exact", seed: int = 0, cfg: ApproxCfg = ApproxCfg()) -> int:
    """Approximate (or exact) size of N(u) symmetric-difference N(v)."""
    if u == v:
        raise ValueError("apd needs two distinct vertices")
    if mode == "exact":
        return neighborhood_difference(g, u, v)
    if mode != "sketched":
        raise ValueError(f"unknown apd mode {mode!r}")
    key = (g, seed, cfg)
    per_vertex = _APD_CACHE.setdefault(key, {})
    for w in (u, v):
        if w not in per_vertex:
            per_vertex[w] = build_approx_sketch(g.neighbor_sets[w], seed, g.n, cfg)
    if len(_APD_CACHE) > 8:
        stale = next(k for k in _APD_CACHE if k != key)
        del _APD_CACHE[stale]
    return approx_diff_estimate(per_vertex[u], per_vertex[v])
