"""Blow-ups, pentagon counting, and the extremal-pentagon searches.

The limit density functional phi_G lives here: phi_G(H) is the limiting
probability that a random |V(H)|-subset of a huge balanced blow-up of G
induces H.  It is computed exactly from strong homomorphism counts, never
by taking limits numerically.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

import numpy as np

from . import _kernels, census
from .graphs import (
    MAX_VERTICES,
    Rational,
    SmallGraph,
    automorphism_count,
    canonical_code,
    canonical_form,
    cycle,
    is_triangle_free,
    strong_hom_count,
    to_graph6,
)

WORD_BITS = _kernels.WORD_BITS
MAX_BLOWUP_VERTICES = 256


class LargeGraph:
    """Explicit graph on up to 256 vertices, rows packed 63 bits per word.

    Produced by :func:`blowup` when the result exceeds the SmallGraph cap.
    Supports exactly what the extremal checks need: edge queries and
    pentagon counting.
    """

    __slots__ = ("n", "words")

    def __init__(self, n: int, words: np.ndarray):
        self.n = n
        self.words = words

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.words[u, v // WORD_BITS] >> (v % WORD_BITS) & 1)

    def degree(self, v: int) -> int:
        return sum(int(w).bit_count() for w in self.words[v])

    def edge_count(self) -> int:
        return sum(self.degree(v) for v in range(self.n)) // 2


def _word_count(n: int) -> int:
    return (n + WORD_BITS - 1) // WORD_BITS


def _words_from_small(g: SmallGraph) -> np.ndarray:
    words = np.zeros((g.n, _word_count(g.n)), np.int64)
    for v, row in enumerate(g.rows):
        m = row
        while m:
            low = m & -m
            b = low.bit_length() - 1
            words[v, b // WORD_BITS] |= np.int64(1 << (b % WORD_BITS))
            m ^= low
    return words


def _adjacency_matrix(words: np.ndarray, n: int) -> np.ndarray:
    A = np.zeros((n, n), np.int32)
    for v in range(n):
        for w in range(words.shape[1]):
            m = int(words[v, w])
            while m:
                low = m & -m
                A[v, w * WORD_BITS + low.bit_length() - 1] = 1
                m ^= low
    return A


@dataclass(frozen=True)
class BlowupSpec:
    """A base graph together with one positive class size per base vertex."""

    base: SmallGraph
    parts: tuple[int, ...]

    def __post_init__(self):
        if len(self.parts) != self.base.n:
            raise ValueError(
                f"{len(self.parts)} part sizes for a base on {self.base.n} vertices"
            )
        if any(k < 1 for k in self.parts):
            raise ValueError("all blow-up parts must be >= 1")

    @property
    def total(self) -> int:
        return sum(self.parts)


def blowup(spec: BlowupSpec) -> SmallGraph | LargeGraph:
    """Replace base vertex v by an independent class of spec.parts[v] vertices.

    Two vertices are adjacent iff their classes come from adjacent base
    vertices.  Returns a SmallGraph when the result fits in 32 vertices,
    otherwise a word-packed LargeGraph (up to 256 vertices).
    """
    n = spec.total
    base = spec.base
    offsets = [0] * (base.n + 1)
    for i, k in enumerate(spec.parts):
        offsets[i + 1] = offsets[i] + k
    if n <= MAX_VERTICES:
        rows = [0] * n
        for v in range(base.n):
            mask = 0
            for u in base.neighbors(v):
                mask |= ((1 << spec.parts[u]) - 1) << offsets[u]
            for x in range(offsets[v], offsets[v + 1]):
                rows[x] = mask
        return SmallGraph._from_rows(tuple(rows))
    if n > MAX_BLOWUP_VERTICES:
        raise ValueError(f"blow-up on {n} vertices exceeds cap {MAX_BLOWUP_VERTICES}")
    W = _word_count(n)
    class_mask = np.zeros((base.n, W), np.int64)
    for u in range(base.n):
        for x in range(offsets[u], offsets[u + 1]):
            class_mask[u, x // WORD_BITS] |= np.int64(1 << (x % WORD_BITS))
    words = np.zeros((n, W), np.int64)
    for v in range(base.n):
        mask = np.zeros(W, np.int64)
        for u in base.neighbors(v):
            mask |= class_mask[u]
        words[offsets[v] : offsets[v + 1]] = mask
    return LargeGraph(n, words)


def count_pentagons(g: SmallGraph | LargeGraph) -> int:
    """Number of 5-cycles; input must be triangle-free.

    In a triangle-free graph every 5-cycle is induced and chordless, so
    this equals the induced-C5 count.
    """
    if isinstance(g, SmallGraph):
        if not is_triangle_free(g):
            raise ValueError("graph has a triangle; pentagon counting requires triangle-free input")
        words = _words_from_small(g)
        n = g.n
    else:
        n = g.n
        words = g.words
        A = _adjacency_matrix(words, n)
        if ((A @ A) * A).any():
            raise ValueError("graph has a triangle; pentagon counting requires triangle-free input")
    if n < 5:
        return 0
    return int(_kernels.pentagon_count(words, n))


def chi(n: int) -> int:
    """Pentagon count of an almost balanced C5 blow-up on n vertices."""
    if n < 0:
        raise ValueError("chi is defined for n >= 0")
    led, a = divmod(n, 5)
    return led ** (5 - a) * (led + 1) ** a


def michael_graph() -> SmallGraph:
    """The 8-cycle with the four long chords: triangle-free, 8 pentagons."""
    edges = [(i, (i + 1) % 8) for i in range(8)] + [(i, i + 4) for i in range(4)]
    return SmallGraph(8, edges)


def phi_blowup_density(h: SmallGraph, g: SmallGraph) -> Fraction:
    """Limit of p(h, balanced blow-up of g) as class sizes grow.

    Exact value (m!/|Aut(h)|) * s(h,g) / n^m with m = |V(h)|, n = |V(g)|.
    In the limit the m sampled vertices land in independently chosen
    classes, so the class-assignment map is a uniform random map V(h) ->
    V(g), and the induced graph is h exactly for the strong homomorphisms.
    """
    m = h.n
    if m == 0:
        return Fraction(1)
    if g.n == 0:
        return Fraction(0)
    s = strong_hom_count(h, g)
    return Fraction(factorial(m) * s, automorphism_count(h) * g.n**m)


def _d5_orbit_min(parts: Sequence[int]) -> tuple[int, ...]:
    best = None
    p = list(parts)
    for _ in range(2):
        for r in range(5):
            cand = tuple(p[(i + r) % 5] for i in range(5))
            if best is None or cand < best:
                best = cand
        p.reverse()
    return best


def almost_balanced_blowups(n: int) -> list[SmallGraph | LargeGraph]:
    """All C5 blow-ups on n vertices with class sizes differing by <= 1.

    Deduplicated up to isomorphism; isomorphism of C5 blow-ups is exactly
    dihedral equivalence of the part vectors.
    """
    if n < 5:
        raise ValueError("almost balanced C5 blow-ups need n >= 5")
    led, a = divmod(n, 5)
    reps = set()
    from itertools import combinations

    for big in combinations(range(5), a):
        parts = [led] * 5
        for i in big:
            parts[i] = led + 1
        reps.add(_d5_orbit_min(parts))
    out = [blowup(BlowupSpec(cycle(5), parts)) for parts in sorted(reps)]
    return out


def strong_hom_expansion(h: SmallGraph) -> Fraction:
    """phi_{C5}(h) computed as a sum over classes of strong homomorphisms.

    Each Aut(h)-orbit of strong homomorphisms alpha: h -> C5 contributes
    the multinomial m!/prod |alpha^{-1}(i)|!, scaled by 5^{-m}.  Agrees
    with phi_blowup_density(h, C5).
    """
    if not is_triangle_free(h):
        raise ValueError("strong-hom expansion is defined for triangle-free graphs")
    m = h.n
    if m == 0:
        return Fraction(1)
    c5 = cycle(5)
    autos = _automorphisms(h)
    seen = set()
    total = 0
    for alpha in _strong_homs(h, c5):
        rep = min(tuple(alpha[gam[i]] for i in range(m)) for gam in autos)
        if rep in seen:
            continue
        seen.add(rep)
        sizes = [0] * 5
        for x in alpha:
            sizes[x] += 1
        c = factorial(m)
        for s in sizes:
            c //= factorial(s)
        total += c
    return Fraction(total, 5**m)


def _automorphisms(g: SmallGraph) -> list[tuple[int, ...]]:
    n = g.n
    if n == 0:
        return [()]
    rows = g.rows
    out = []
    image = [-1] * n

    def extend(v: int, used: int):
        if v == n:
            out.append(tuple(image))
            return
        cand = ~used & ((1 << n) - 1)
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
            if rows[w].bit_count() != rows[v].bit_count():
                continue
            image[v] = w
            extend(v + 1, used | 1 << w)
        image[v] = -1

    extend(0, 0)
    return out


def _strong_homs(h: SmallGraph, g: SmallGraph) -> list[list[int]]:
    m, n = h.n, g.n
    full = (1 << n) - 1
    out: list[list[int]] = []
    alpha = [0] * m

    def extend(d: int, cand: int):
        if d == m:
            out.append(alpha.copy())
            return
        c = cand
        while c:
            low = c & -c
            x = low.bit_length() - 1
            c ^= low
            alpha[d] = x
            if d + 1 == m:
                out.append(alpha.copy())
                continue
            nc = full
            for u in range(d + 1):
                if h.rows[u] >> (d + 1) & 1:
                    nc &= g.rows[alpha[u]]
                else:
                    nc &= full & ~g.rows[alpha[u]]
                if nc == 0:
                    break
            if nc:
                extend(d + 1, nc)

    extend(0, full)
    return out


@dataclass(frozen=True)
class ExtremalReport:
    """Outcome of the exhaustive pentagon maximization at one size."""

    n: int
    max_pentagons: int
    chi_value: int
    extremal_graph6: tuple[str, ...]
    all_almost_balanced: bool
    sporadic_present: bool


def _scan_codes(codes: Sequence[bytes], n: int) -> tuple[int, list[bytes]]:
    best = -1
    arg: list[bytes] = []
    for code in codes:
        g = census._decode_code(code, n)
        c = int(_kernels.pentagon_count(_words_from_small(g), n))
        if c > best:
            best, arg = c, [code]
        elif c == best:
            arg.append(code)
    return best, arg


def exhaustive_max_pentagons(n: int, workers: int = 1) -> ExtremalReport:
    """Maximize pentagon count over every triangle-free graph on n vertices."""
    if not 5 <= n <= 10:
        raise ValueError(f"exhaustive search supports 5 <= n <= 10, got {n}")
    codes = census._codes(n)
    if workers > 1:
        chunks = [codes[i::workers] for i in range(workers)]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            parts = pool.starmap(_scan_codes, [(c, n) for c in chunks])
        best = max(p[0] for p in parts)
        arg = sorted(code for b, codes_ in parts if b == best for code in codes_)
    else:
        best, arg = _scan_codes(codes, n)
    extremal = [census._decode_code(code, n) for code in arg]
    ab_codes = {canonical_code(g) for g in almost_balanced_blowups(n)}
    flags = [canonical_code(g) in ab_codes for g in extremal]
    return ExtremalReport(
        n=n,
        max_pentagons=best,
        chi_value=chi(n),
        extremal_graph6=tuple(to_graph6(g) for g in extremal),
        all_almost_balanced=all(flags),
        sporadic_present=not all(flags),
    )
