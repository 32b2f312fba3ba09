"""Exact primitives for small simple graphs.

Graphs live on at most 32 vertices and are stored as per-vertex adjacency
bitmasks, which keeps isomorphism-invariant work (canonical forms,
automorphisms, induced-subgraph statistics) fast enough to be called in
inner loops.  All counting is exact: integers and ``fractions.Fraction``
throughout, no floating point.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator

import numpy as np

from . import _kernels

Rational = Fraction

_EXHAUSTIVE_MAX = 8  # canonical form switches schemes above this size
MAX_VERTICES = 32


class SmallGraph:
    """Immutable simple graph on ``n <= 32`` vertices.

    ``rows[v]`` is the neighbor bitmask of vertex ``v``.  Instances are
    hashable and compare by labeled structure; use :func:`canonical_form`
    before comparing up to isomorphism.
    """

    __slots__ = ("n", "rows", "_canonical")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if not 0 <= n <= MAX_VERTICES:
            raise ValueError(f"vertex count {n} outside supported range 0..{MAX_VERTICES}")
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "_canonical", False)

    @classmethod
    def _from_rows(cls, rows: tuple[int, ...], canonical: bool = False) -> "SmallGraph":
        g = cls.__new__(cls)
        object.__setattr__(g, "n", len(rows))
        object.__setattr__(g, "rows", rows)
        object.__setattr__(g, "_canonical", canonical)
        return g

    def __setattr__(self, name, value):
        raise AttributeError("SmallGraph is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, SmallGraph)
            and self.n == other.n
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"SmallGraph.from_graph6({to_graph6(self)!r})"

    @property
    def is_canonical(self) -> bool:
        return self._canonical

    def edges(self) -> list[tuple[int, int]]:
        return [
            (u, v)
            for u in range(self.n)
            for v in range(u + 1, self.n)
            if self.rows[u] >> v & 1
        ]

    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return _bits(self.rows[v])

    def rows_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    @classmethod
    def from_graph6(cls, text: str) -> "SmallGraph":
        return from_graph6(text)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# ---------------------------------------------------------------------------
# constructors

def empty_graph(n: int) -> SmallGraph:
    return SmallGraph(n)


def complete_graph(n: int) -> SmallGraph:
    return SmallGraph(n, itertools.combinations(range(n), 2))


def cycle(n: int) -> SmallGraph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return SmallGraph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> SmallGraph:
    return SmallGraph(n, [(i, i + 1) for i in range(n - 1)])


def complete_bipartite(a: int, b: int) -> SmallGraph:
    return SmallGraph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def star(leaves: int) -> SmallGraph:
    return complete_bipartite(1, leaves)


def disjoint_union(*graphs: SmallGraph) -> SmallGraph:
    n = sum(g.n for g in graphs)
    edges = []
    off = 0
    for g in graphs:
        edges.extend((u + off, v + off) for u, v in g.edges())
        off += g.n
    return SmallGraph(n, edges)


def relabel(g: SmallGraph, perm) -> SmallGraph:
    """Image of ``g`` under the vertex map ``i -> perm[i]``."""
    rows = [0] * g.n
    for i in range(g.n):
        m = g.rows[i]
        t = 0
        while m:
            low = m & -m
            t |= 1 << perm[low.bit_length() - 1]
            m ^= low
        rows[perm[i]] = t
    return SmallGraph._from_rows(tuple(rows))


def induced_subgraph(g: SmallGraph, verts) -> SmallGraph:
    """Subgraph induced on ``verts``, relabeled to 0..k-1 in the given order."""
    vs = list(verts)
    pos = {v: i for i, v in enumerate(vs)}
    rows = [0] * len(vs)
    for i, v in enumerate(vs):
        m = g.rows[v]
        for w in vs:
            if m >> w & 1:
                rows[i] |= 1 << pos[w]
    return SmallGraph._from_rows(tuple(rows))


# ---------------------------------------------------------------------------
# graph6 codec (standard ASCII encoding, n <= 62 single-byte header)

def to_graph6(g: SmallGraph) -> str:
    if g.n > 62:
        raise ValueError("graph6 single-byte header supports n <= 62")
    bits = []
    for v in range(1, g.n):
        for u in range(v):
            bits.append(g.rows[u] >> v & 1)
    while len(bits) % 6:
        bits.append(0)
    chars = [chr(g.n + 63)]
    for i in range(0, len(bits), 6):
        val = 0
        for b in bits[i : i + 6]:
            val = val << 1 | b
        chars.append(chr(val + 63))
    return "".join(chars)


def from_graph6(text: str) -> SmallGraph:
    text = text.strip()
    if not text:
        raise ValueError("empty graph6 string")
    n = ord(text[0]) - 63
    if not 0 <= n <= 62:
        raise ValueError(f"unsupported graph6 header {text[0]!r}")
    if n > MAX_VERTICES:
        raise ValueError(f"graph on {n} vertices exceeds cap {MAX_VERTICES}")
    need = (n * (n - 1) // 2 + 5) // 6
    body = text[1:]
    if len(body) != need:
        raise ValueError(f"graph6 body length {len(body)}, expected {need}")
    bits = []
    for ch in body:
        val = ord(ch) - 63
        if not 0 <= val < 64:
            raise ValueError(f"invalid graph6 character {ch!r}")
        bits.extend(val >> (5 - k) & 1 for k in range(6))
    rows = [0] * n
    idx = 0
    for v in range(1, n):
        for u in range(v):
            if bits[idx]:
                rows[u] |= 1 << v
                rows[v] |= 1 << u
            idx += 1
    if any(bits[idx:]):
        raise ValueError("nonzero padding in graph6 body")
    return SmallGraph._from_rows(tuple(rows))


# ---------------------------------------------------------------------------
# structure predicates and counts

def is_triangle_free(g: SmallGraph) -> bool:
    rows = g.rows
    for u in range(g.n):
        m = rows[u]
        v_mask = m
        while v_mask:
            low = v_mask & -v_mask
            v = low.bit_length() - 1
            v_mask ^= low
            if v > u and rows[v] & m:
                return False
    return True


def is_twin_free(g: SmallGraph) -> bool:
    """True iff no two vertices share the same neighbor set."""
    return len(set(g.rows)) == g.n


def canonical_form(g: SmallGraph) -> SmallGraph:
    """Canonical representative of the isomorphism class of ``g``.

    Equal outputs iff the inputs are isomorphic.  Exhaustive minimum over
    vertex orders up to 8 vertices; refinement with pruned backtracking
    above that.  The two schemes apply to disjoint size ranges, so each
    size class has one fixed representative.
    """
    if g._canonical:
        return g
    if g.n <= 1:
        return SmallGraph._from_rows(g.rows, canonical=True)
    arr = g.rows_array()
    if g.n <= _EXHAUSTIVE_MAX:
        vord = _kernels.canon_perm_exhaustive(arr, g.n)
    else:
        vord = _kernels.canon_perm_refine(arr, g.n)
    # vord maps new position -> old vertex; relabel wants the inverse
    inv = [0] * g.n
    for i in range(g.n):
        inv[vord[i]] = i
    out = relabel(g, inv)
    return SmallGraph._from_rows(out.rows, canonical=True)


def canonical_code(g: SmallGraph) -> bytes:
    """Compact canonical key: upper-triangle bits of the canonical form.

    Ordering these byte strings matches ordering the canonical graph6
    strings, because graph6 serializes the same bits in the same order.
    """
    c = canonical_form(g)
    bits = bytearray()
    for v in range(1, c.n):
        for u in range(v):
            bits.append(c.rows[u] >> v & 1)
    return bytes(bits)


def automorphism_count(g: SmallGraph) -> int:
    """Order of the automorphism group, by pruned backtracking."""
    n = g.n
    if n <= 1:
        return 1
    rows = g.rows
    # invariant per vertex: (degree, sorted neighbor degrees)
    degs = [rows[v].bit_count() for v in range(n)]
    inv = [
        (degs[v], tuple(sorted(degs[w] for w in _bits(rows[v]))))
        for v in range(n)
    ]
    image = [-1] * n
    used = 0

    def extend(v: int) -> int:
        nonlocal used
        if v == n:
            return 1
        total = 0
        cand = 0
        for w in range(n):
            if inv[w] == inv[v]:
                cand |= 1 << w
        cand &= ~used
        for u in range(v):
            if rows[v] >> u & 1:
                cand &= rows[image[u]]
            else:
                cand &= ~rows[image[u]]
        m = cand
        while m:
            low = m & -m
            w = low.bit_length() - 1
            m ^= low
            image[v] = w
            used |= 1 << w
            total += extend(v + 1)
            used &= ~(1 << w)
        image[v] = -1
        return total

    return extend(0)


def count_induced(h: SmallGraph, g: SmallGraph) -> int:
    """Number of |V(h)|-subsets of V(g) inducing a copy of ``h``."""
    if h.n > g.n:
        raise ValueError(f"pattern on {h.n} vertices larger than host on {g.n}")
    counts = induced_counts(g, h.n)
    return counts.get(canonical_code(h), 0)


def induced_counts(g: SmallGraph, m: int) -> dict[bytes, int]:
    """Canonical code -> count over all induced m-vertex subgraphs of g."""
    if not 0 <= m <= g.n:
        raise ValueError(f"subset size {m} outside 0..{g.n}")
    out: dict[bytes, int] = {}
    for subset in itertools.combinations(range(g.n), m):
        key = canonical_code(induced_subgraph(g, subset))
        out[key] = out.get(key, 0) + 1
    return out


def density(h: SmallGraph, g: SmallGraph) -> Fraction:
    """p(h, g): probability a uniform |V(h)|-subset of g induces h."""
    return Fraction(count_induced(h, g), comb(g.n, h.n))


def strong_hom_count(h: SmallGraph, g: SmallGraph) -> int:
    """Maps V(h) -> V(g) preserving edges and non-edges both ways."""
    if h.n == 0:
        return 1
    if g.n == 0:
        return 0
    return int(
        _kernels.strong_hom_count(h.rows_array(), h.n, g.rows_array(), g.n)
    )


def iter_subsets(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, including 0 and mask itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask
