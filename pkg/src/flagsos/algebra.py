"""Exact flag algebra over triangle-free graphs.

A type is a fully labeled triangle-free graph on k vertices; a flag is a
graph carrying an induced labeled copy of its type.  Internally every flag
is normalized so the labeled vertices are 0..k-1 in label order, and
canonicalized by minimizing the adjacency code over permutations of the
unlabeled vertices only.  Two flags are equal exactly when some
isomorphism between them fixes every label.

Elements of the algebra are sparse rational combinations of canonical
flags sharing one type.  Constants are multiples of the type itself (the
unit), so affine expressions like (rho - 2/5) stay inside the algebra.
All arithmetic is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping

from . import census
from .extremal import phi_blowup_density
from .graphs import (
    Rational,
    SmallGraph,
    canonical_form,
    cycle,
    from_graph6,
    induced_subgraph,
    is_triangle_free,
    to_graph6,
)

PRODUCT_MAX_SIZE = 7  # largest expansion size the generic engine supports


@dataclass(frozen=True)
class TypeSigma:
    """A fully labeled triangle-free graph; vertex i carries label i+1."""

    graph: SmallGraph

    def __post_init__(self):
        if not is_triangle_free(self.graph):
            raise ValueError("types must be triangle-free")

    @property
    def k(self) -> int:
        return self.graph.n

    def __repr__(self):
        return f"TypeSigma({to_graph6(self.graph)!r})"


def trivial_type() -> TypeSigma:
    return TypeSigma(SmallGraph(0))


def sigma_type(i: int) -> TypeSigma:
    """The three 3-vertex types fixed by swapping labels 1 and 2.

    0: edgeless; 1: the edge {1,2} plus isolated 3; 2: the path 1-3-2.
    """
    if i == 0:
        return TypeSigma(SmallGraph(3))
    if i == 1:
        return TypeSigma(SmallGraph(3, [(0, 1)]))
    if i == 2:
        return TypeSigma(SmallGraph(3, [(0, 2), (1, 2)]))
    raise ValueError(f"sigma_type takes 0, 1 or 2, got {i}")


def type_P() -> TypeSigma:
    """The labeled 5-cycle 1-2-3-4-5-1."""
    return TypeSigma(cycle(5))


@lru_cache(maxsize=None)
def _canon_flag_rows(rows: tuple[int, ...], k: int) -> tuple[int, ...]:
    """Minimum adjacency code over permutations of vertices k..m-1."""
    m = len(rows)
    if m - k <= 1:
        return rows
    if k == 0:
        return canonical_form(SmallGraph._from_rows(rows)).rows
    pairs = [(u, v) for v in range(1, m) for u in range(v)]
    best = None
    best_order = None
    for perm in itertools.permutations(range(k, m)):
        order = tuple(range(k)) + perm
        code = tuple(rows[order[u]] >> order[v] & 1 for u, v in pairs)
        if best is None or code < best:
            best, best_order = code, order
    out = [0] * m
    pos = {v: i for i, v in enumerate(best_order)}
    for i, v in enumerate(best_order):
        r = rows[v]
        while r:
            low = r & -r
            out[i] |= 1 << pos[low.bit_length() - 1]
            r ^= low
    return tuple(out)


@dataclass(frozen=True)
class Flag:
    """Canonical flag: labeled vertices 0..k-1, unlabeled part minimized.

    Build through :func:`make_flag`; the constructor trusts its input.
    """

    graph: SmallGraph
    k: int

    @property
    def size(self) -> int:
        return self.graph.n

    def __repr__(self):
        return f"Flag({to_graph6(self.graph)!r}, k={self.k})"


def make_flag(graph: SmallGraph, k: int) -> Flag:
    if not 0 <= k <= graph.n:
        raise ValueError(f"label count {k} outside 0..{graph.n}")
    if not is_triangle_free(graph):
        raise ValueError("flags must be triangle-free")
    rows = _canon_flag_rows(graph.rows, k)
    return Flag(SmallGraph._from_rows(rows), k)


def _subflag(flag: Flag, extra: Iterable[int]) -> Flag:
    """Sub-flag on the labels plus the given unlabeled vertices."""
    verts = list(range(flag.k)) + sorted(extra)
    return make_flag(induced_subgraph(flag.graph, verts), flag.k)


class AlgebraElement:
    """Sparse rational combination of flags over one type."""

    __slots__ = ("type", "terms")

    def __init__(self, typ: TypeSigma, terms: Mapping[Flag, Fraction] = ()):
        clean: dict[Flag, Fraction] = {}
        for flag, coeff in dict(terms).items():
            c = Fraction(coeff)
            if c == 0:
                continue
            if flag.k != typ.k:
                raise ValueError("flag label count does not match the type")
            if _embedded_type_rows(flag, typ) != typ.graph.rows:
                raise ValueError("flag does not embed the element's type")
            clean[flag] = c
        object.__setattr__(self, "type", typ)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    # -- value semantics ---------------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, AlgebraElement)
            and self.type == other.type
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.type, frozenset(self.terms.items())))

    def __repr__(self):
        inner = " + ".join(f"({c})*{f!r}" for f, c in sorted(
            self.terms.items(), key=lambda t: (t[0].size, t[0].graph.rows)))
        return f"<{inner or '0'}>"

    # -- linear structure --------------------------------------------------
    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if self.type != other.type:
            raise ValueError("type mismatch in algebra addition")
        terms = dict(self.terms)
        for f, c in other.terms.items():
            terms[f] = terms.get(f, Fraction(0)) + c
        return AlgebraElement(self.type, terms)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.type, {f: -c for f, c in self.terms.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, q) -> "AlgebraElement":
        q = Fraction(q)
        return AlgebraElement(self.type, {f: c * q for f, c in self.terms.items()})

    def __rmul__(self, q):
        if isinstance(q, AlgebraElement):
            return NotImplemented
        return self.scale(q)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return flag_product(self, other)
        return self.scale(other)

    def max_size(self) -> int:
        return max((f.size for f in self.terms), default=self.type.k)


def _embedded_type_rows(flag: Flag, typ: TypeSigma) -> tuple[int, ...]:
    k = typ.k
    mask = (1 << k) - 1
    return tuple(flag.graph.rows[v] & mask for v in range(k))


def unit(typ: TypeSigma) -> AlgebraElement:
    """The multiplicative identity: the type as a flag of its own size."""
    return AlgebraElement(typ, {make_flag(typ.graph, typ.k): Fraction(1)})


def constant(typ: TypeSigma, q) -> AlgebraElement:
    return unit(typ).scale(q)


def graph_element(g: SmallGraph) -> AlgebraElement:
    """A plain graph as an element over the trivial type."""
    return AlgebraElement(trivial_type(), {make_flag(g, 0): Fraction(1)})


def rho() -> AlgebraElement:
    """Edge density: the single-edge flag over the trivial type."""
    return graph_element(SmallGraph(2, [(0, 1)]))


def flag_FV(sigma: TypeSigma, V: Iterable[int]) -> Flag:
    """The (k+1)-vertex flag whose unlabeled vertex sees exactly labels V.

    V uses the 1-based label names; it must be independent in the type.
    """
    k = sigma.k
    vs = sorted(set(V))
    if any(not 1 <= v <= k for v in vs):
        raise ValueError(f"labels {vs} outside 1..{k}")
    for a, b in itertools.combinations(vs, 2):
        if sigma.graph.has_edge(a - 1, b - 1):
            raise ValueError(f"V not independent: labels {a} and {b} are adjacent")
    edges = list(sigma.graph.edges()) + [(v - 1, k) for v in vs]
    return make_flag(SmallGraph(k + 1, edges), k)


def flag_fj(sigma: TypeSigma, j: int) -> AlgebraElement:
    """Sum of F_V over all independent j-subsets V of the labels."""
    if not 0 <= j <= sigma.k:
        raise ValueError(f"subset size {j} outside 0..{sigma.k}")
    terms: dict[Flag, Fraction] = {}
    for vs in itertools.combinations(range(1, sigma.k + 1), j):
        if any(sigma.graph.has_edge(a - 1, b - 1) for a, b in itertools.combinations(vs, 2)):
            continue
        terms[flag_FV(sigma, vs)] = Fraction(1)
    return AlgebraElement(sigma, terms)


# ---------------------------------------------------------------------------
# flag bases

_basis_cache: dict[tuple[SmallGraph, int], tuple[Flag, ...]] = {}


def flags_of_size(sigma: TypeSigma, m: int) -> tuple[Flag, ...]:
    """All canonical flags of size m over the type, in a fixed order."""
    k = sigma.k
    if m < k:
        raise ValueError(f"flag size {m} below type size {k}")
    key = (sigma.graph, m)
    if key in _basis_cache:
        return _basis_cache[key]
    if k == 0:
        flags = tuple(Flag(g, 0) for g in census.enumerate_models(m)) if m else (
            Flag(SmallGraph(0), 0),
        )
    else:
        level = {make_flag(sigma.graph, k)}
        for t in range(k, m):
            nxt = set()
            for flag in level:
                rows = flag.graph.rows
                for mask in range(1 << t):
                    ok = True
                    mm = mask
                    while mm:
                        low = mm & -mm
                        if rows[low.bit_length() - 1] & mask:
                            ok = False
                            break
                        mm ^= low
                    if not ok:
                        continue
                    newrows = tuple(
                        r | ((mask >> v & 1) << t) for v, r in enumerate(rows)
                    ) + (mask,)
                    nxt.add(make_flag(SmallGraph._from_rows(newrows), k))
            level = nxt
        flags = tuple(sorted(level, key=lambda f: f.graph.rows))
    _basis_cache[key] = flags
    return flags


# ---------------------------------------------------------------------------
# the algebra operations

def flag_product(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Bilinear flag product.

    For factors of sizes m1, m2 over a type of size k, the coefficient of
    a size-(m1+m2-k) flag F is the probability that a uniformly random
    split of the unlabeled vertices of F into parts of sizes m1-k and
    m2-k induces the two factors.
    """
    if a.type != b.type:
        raise ValueError("type mismatch in flag product")
    k = a.type.k
    out: dict[Flag, Fraction] = {}
    for f1, c1 in a.terms.items():
        for f2, c2 in b.terms.items():
            m1, m2 = f1.size, f2.size
            N = m1 + m2 - k
            if N > PRODUCT_MAX_SIZE:
                raise ValueError(
                    f"product lands at size {N}, beyond supported {PRODUCT_MAX_SIZE}"
                )
            u, u1 = N - k, m1 - k
            weight = c1 * c2
            for big in flags_of_size(a.type, N):
                hits = 0
                unlabeled = range(k, N)
                for S in itertools.combinations(unlabeled, u1):
                    rest = [v for v in unlabeled if v not in S]
                    if _subflag(big, S) == f1 and _subflag(big, rest) == f2:
                        hits += 1
                if hits:
                    q = Fraction(hits, comb(u, u1)) * weight
                    out[big] = out.get(big, Fraction(0)) + q
    return AlgebraElement(a.type, out)


def average(a: AlgebraElement) -> AlgebraElement:
    """The downward averaging operator, landing in the trivial type.

    A flag F maps to q*[F], where [F] forgets the labels and q is the
    probability that re-labeling [F] by a uniformly random ordered
    k-subset of its vertices reproduces F.
    """
    k = a.type.k
    out: dict[Flag, Fraction] = {}
    for flag, c in a.terms.items():
        if k == 0:
            target, q = flag, Fraction(1)
        else:
            g = flag.graph
            m = g.n
            hits = 0
            total = 0
            for tup in itertools.permutations(range(m), k):
                total += 1
                if not _induces_type(g, tup, a.type):
                    continue
                rest = [v for v in range(m) if v not in tup]
                cand = make_flag(induced_subgraph(g, list(tup) + rest), k)
                if cand == flag:
                    hits += 1
            target = make_flag(g, 0)
            q = Fraction(hits, total)
        if q:
            out[target] = out.get(target, Fraction(0)) + c * q
    return AlgebraElement(trivial_type(), out)


def _induces_type(g: SmallGraph, tup: tuple[int, ...], typ: TypeSigma) -> bool:
    for j in range(len(tup)):
        for i in range(j):
            if g.has_edge(tup[i], tup[j]) != typ.graph.has_edge(i, j):
                return False
    return True


def upward_pi(sigma: TypeSigma, a: AlgebraElement) -> AlgebraElement:
    """Lift an element of the trivial type to the type sigma.

    A graph G of size m maps to the unit-coefficient sum of all flags of
    size m+k whose unlabeled part is isomorphic to G.
    """
    if a.type.k != 0:
        raise ValueError("upward_pi expects an element over the trivial type")
    k = sigma.k
    out: dict[Flag, Fraction] = {}
    for flag, c in a.terms.items():
        g_canon = canonical_form(flag.graph)
        for cand in flags_of_size(sigma, flag.size + k):
            rest = range(k, cand.size)
            if canonical_form(induced_subgraph(cand.graph, rest)) == g_canon:
                out[cand] = out.get(cand, Fraction(0)) + c
    return AlgebraElement(sigma, out)


def lift(a: AlgebraElement, N: int) -> AlgebraElement:
    """Re-express an element in the size-N flag basis of its type.

    Evaluation-equivalent to the input: each flag F becomes the sum of
    p(F, F')*F' over size-N flags F', p being the sub-flag density.
    """
    if N < a.max_size():
        raise ValueError(f"lift level {N} below largest flag size {a.max_size()}")
    k = a.type.k
    basis = flags_of_size(a.type, N)
    out: dict[Flag, Fraction] = {}
    for flag, c in a.terms.items():
        m = flag.size
        if m == N:
            out[flag] = out.get(flag, Fraction(0)) + c
            continue
        for big in basis:
            hits = sum(
                1
                for S in itertools.combinations(range(k, N), m - k)
                if _subflag(big, S) == flag
            )
            if hits:
                q = Fraction(hits, comb(N - k, m - k))
                out[big] = out.get(big, Fraction(0)) + c * q
    return AlgebraElement(a.type, out)


def eval_blowup(a: AlgebraElement, g: SmallGraph) -> Fraction:
    """Apply the blow-up limit functional phi_g term by term."""
    if a.type.k != 0:
        raise ValueError("eval_blowup expects an element over the trivial type")
    total = Fraction(0)
    for flag, c in a.terms.items():
        total += c * phi_blowup_density(flag.graph, g)
    return total


# ---------------------------------------------------------------------------
# serialization helpers (used by the certificate file format)

def flag_to_obj(flag: Flag) -> dict:
    return {"graph6": to_graph6(flag.graph), "labels": list(range(flag.k))}


def flag_from_obj(obj: dict, sigma: TypeSigma) -> Flag:
    g = from_graph6(obj["graph6"])
    labels = list(obj["labels"])
    k = sigma.k
    if len(labels) != k or sorted(set(labels)) != sorted(labels):
        raise ValueError(f"flag label list {labels} is not {k} distinct vertices")
    if any(not 0 <= v < g.n for v in labels):
        raise ValueError(f"flag label list {labels} out of range")
    if g.n == k + 1:
        # single unlabeled vertex: report its neighborhood when invalid
        (free,) = set(range(g.n)) - set(labels)
        seen = [i + 1 for i, v in enumerate(labels) if g.has_edge(free, v)]
        for a, b in itertools.combinations(seen, 2):
            if sigma.graph.has_edge(a - 1, b - 1):
                raise ValueError(f"V not independent: labels {a} and {b} are adjacent")
    if not is_triangle_free(g):
        raise ValueError("flag graph is not triangle-free")
    order = labels + [v for v in range(g.n) if v not in labels]
    flag = make_flag(induced_subgraph(g, order), k)
    if _embedded_type_rows(flag, sigma) != sigma.graph.rows:
        raise ValueError("flag labels do not induce the block's type")
    return flag


def element_to_obj(a: AlgebraElement) -> list[dict]:
    items = sorted(a.terms.items(), key=lambda t: (t[0].size, t[0].graph.rows))
    return [
        {"flag": flag_to_obj(f), "coefficient": format_rational(c)}
        for f, c in items
    ]


def element_from_obj(obj: Iterable[dict], sigma: TypeSigma) -> AlgebraElement:
    terms: dict[Flag, Fraction] = {}
    for item in obj:
        f = flag_from_obj(item["flag"], sigma)
        c = parse_rational(item["coefficient"])
        terms[f] = terms.get(f, Fraction(0)) + c
    return AlgebraElement(sigma, terms)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"malformed rational: {text!r}")
    parts = text.strip().split("/")
    try:
        if len(parts) == 1:
            return Fraction(int(parts[0]))
        if len(parts) == 2:
            num, den = int(parts[0]), int(parts[1])
            if den <= 0:
                raise ValueError
            return Fraction(num, den)
    except ValueError:
        pass
    raise ValueError(f"malformed rational: {text!r}")
