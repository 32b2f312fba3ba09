"""Sum-of-squares certificates for density inequalities, verified exactly.

A certificate asserts: target_coefficient * target + linear terms + sum of
averaged quadratic forms <= bound, as an inequality between elements of
the algebra expanded in the size-N model basis.  Verification is a finite
computation: check every matrix is positive semidefinite and every
expansion coefficient is at most the bound.  Everything runs in exact
rational arithmetic; there is no tolerance anywhere.

The bundled certificate proves that the limiting pentagon density of a
triangle-free graph is at most 2400/62500 = 24/625, attained by balanced
blow-ups of the pentagon.
"""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import census
from .algebra import (
    AlgebraElement,
    Flag,
    TypeSigma,
    average,
    constant,
    element_from_obj,
    element_to_obj,
    flag_FV,
    flag_fj,
    flag_product,
    format_rational,
    graph_element,
    lift,
    parse_rational,
    rho,
    sigma_type,
    trivial_type,
)
from .graphs import (
    SmallGraph,
    canonical_form,
    cycle,
    disjoint_union,
    from_graph6,
    is_triangle_free,
    path,
    to_graph6,
)

THEORY = "triangle-free"


def check_psd(matrix: Sequence[Sequence]) -> bool:
    """Exact positive-semidefiniteness by symmetric Gaussian elimination.

    Pivots must stay nonnegative, and a zero pivot forces its whole
    trailing row to vanish.  Rejects non-symmetric input.
    """
    n = len(matrix)
    A = [[Fraction(x) for x in row] for row in matrix]
    if any(len(row) != n for row in A):
        raise ValueError("matrix not square")
    for i in range(n):
        for j in range(i):
            if A[i][j] != A[j][i]:
                raise ValueError("matrix not symmetric")
    for i in range(n):
        piv = A[i][i]
        if piv < 0:
            return False
        if piv == 0:
            if any(A[i][j] != 0 for j in range(i + 1, n)):
                return False
            continue
        for r in range(i + 1, n):
            if A[r][i] == 0:
                continue
            f = A[r][i] / piv
            for c in range(i, n):
                A[r][c] -= f * A[i][c]
    return True


@dataclass(frozen=True)
class SOSBlock:
    """One provably nonnegative term: the average of g^T M g over its type."""

    sigma: TypeSigma
    vector: tuple[AlgebraElement, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        d = len(self.vector)
        if len(self.matrix) != d or any(len(row) != d for row in self.matrix):
            raise ValueError("matrix shape does not match vector length")
        for i in range(d):
            for j in range(i):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValueError("matrix not symmetric")
        for entry in self.vector:
            if entry.type != self.sigma:
                raise ValueError("vector entry type differs from block type")

    def expansion_size(self) -> int:
        m = max(entry.max_size() for entry in self.vector)
        return 2 * m - self.sigma.k

    def quadratic_form(self) -> AlgebraElement:
        d = len(self.vector)
        acc = constant(self.sigma, 0)
        for i in range(d):
            for j in range(i, d):
                c = self.matrix[i][j] * (1 if i == j else 2)
                if c == 0:
                    continue
                acc = acc + flag_product(self.vector[i], self.vector[j]).scale(c)
        return acc


@dataclass(frozen=True)
class Certificate:
    level: int
    bound: Fraction
    target_graph: SmallGraph
    target_coefficient: Fraction
    linear_terms: tuple[tuple[SmallGraph, Fraction], ...]
    sos_blocks: tuple[SOSBlock, ...]

    def __post_init__(self):
        if self.target_coefficient <= 0:
            raise ValueError("target coefficient must be positive")
        for g in [self.target_graph] + [g for g, _ in self.linear_terms]:
            if not is_triangle_free(g):
                raise ValueError("certificate graph is not triangle-free")


@dataclass(frozen=True)
class VerificationReport:
    """Exact verification outcome; `passed` is the single pass/fail bit."""

    level: int
    bound: Fraction
    coefficients: tuple[tuple[str, Fraction], ...]  # (graph6, coefficient)
    max_coefficient: Fraction
    slacks: tuple[tuple[str, Fraction], ...]
    psd_results: tuple[bool, ...]
    psd_ok: bool
    passed: bool
    derived_bound: Fraction


def expand_lhs(cert: Certificate, workers: int = 1) -> dict[SmallGraph, Fraction]:
    """Coefficient of every size-N model in the certificate's left side."""
    N = cert.level
    for block in cert.sos_blocks:
        if block.expansion_size() > N:
            raise ValueError(
                f"block expands at size {block.expansion_size()}, beyond level {N}"
            )
    total = graph_element(cert.target_graph).scale(cert.target_coefficient)
    for g, c in cert.linear_terms:
        total = total + graph_element(g).scale(c)
    for piece in _block_averages(cert.sos_blocks, workers):
        total = total + piece
    lifted = lift(total, N)
    out: dict[SmallGraph, Fraction] = {}
    for g in census.enumerate_models(N):
        out[g] = lifted.terms.get(Flag(g, 0), Fraction(0))
    return out


def _block_averages(
    blocks: Sequence[SOSBlock], workers: int
) -> list[AlgebraElement]:
    if workers > 1 and len(blocks) > 1:
        payloads = [json.dumps(_block_to_obj(b)) for b in blocks]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(min(workers, len(blocks))) as pool:
            dumped = pool.map(_average_block_payload, payloads)
        return [
            element_from_obj(json.loads(d), trivial_type()) for d in dumped
        ]
    return [average(b.quadratic_form()) for b in blocks]


def _average_block_payload(payload: str) -> str:
    block = _block_from_obj(json.loads(payload))
    return json.dumps(element_to_obj(average(block.quadratic_form())))


def verify(cert: Certificate, workers: int = 1) -> VerificationReport:
    psd_results = tuple(check_psd(b.matrix) for b in cert.sos_blocks)
    psd_ok = all(psd_results)
    coeffs = expand_lhs(cert, workers)
    items = tuple((to_graph6(g), c) for g, c in coeffs.items())
    max_c = max(c for _, c in items)
    slacks = tuple((g6, cert.bound - c) for g6, c in items)
    passed = psd_ok and max_c <= cert.bound
    return VerificationReport(
        level=cert.level,
        bound=cert.bound,
        coefficients=items,
        max_coefficient=max_c,
        slacks=slacks,
        psd_results=psd_results,
        psd_ok=psd_ok,
        passed=passed,
        derived_bound=cert.bound / cert.target_coefficient,
    )


# ---------------------------------------------------------------------------
# the bundled certificate

def bundled_certificate() -> Certificate:
    """The exact sum-of-squares certificate for the 24/625 pentagon bound."""
    s0, s1, s2 = sigma_type(0), sigma_type(1), sigma_type(2)

    def f(sigma: TypeSigma, j: int) -> AlgebraElement:
        return flag_fj(sigma, j)

    def single(sigma: TypeSigma, V) -> AlgebraElement:
        return AlgebraElement(sigma, {flag_FV(sigma, V): Fraction(1)})

    g0 = (
        f(s0, 1) - f(s0, 2),
        f(s0, 1) - f(s0, 0).scale(2) + f(s0, 3).scale(3),
    )
    m0 = ((9760, 2252), (2252, 592))
    g1 = (
        f(s1, 0).scale(2) - f(s1, 1),
        f(s1, 1) - f(s1, 2),
        single(s1, [3]),
    )
    m1 = ((13900, -671, -12807), (-671, 31334, -51136), (-12807, -51136, 98157))
    g2 = (
        f(s2, 0).scale(6) + f(s2, 1) - f(s2, 2).scale(4),
        f(s2, 0).scale(2) - f(s2, 2).scale(2) + single(s2, [3]),
    )
    m2 = ((22708, -40788), (-40788, 78132))
    g1m = (
        single(s1, [1]) - single(s1, [2]),
        single(s1, [2, 3]) - single(s1, [1, 3]),
    )
    m1m = ((1416, -16452), (-16452, 256488))
    rho_centered = (rho() - constant(trivial_type(), Fraction(2, 5)),)
    mirror = (single(s2, [1]) - single(s2, [2]),)

    def block(sigma, vec, mat):
        return SOSBlock(
            sigma,
            tuple(vec),
            tuple(tuple(Fraction(x) for x in row) for row in mat),
        )

    return Certificate(
        level=5,
        bound=Fraction(2400),
        target_graph=canonical_form(cycle(5)),
        target_coefficient=Fraction(62500),
        linear_terms=(
            (canonical_form(path(5)), Fraction(1097, 12)),
            (
                canonical_form(disjoint_union(path(4), SmallGraph(1))),
                Fraction(68, 3),
            ),
        ),
        sos_blocks=(
            block(s0, g0, m0),
            block(s1, g1, m1),
            block(s2, g2, m2),
            block(trivial_type(), rho_centered, ((200,),)),
            block(s1, g1m, m1m),
            block(s2, mirror, ((158266,),)),
        ),
    )


# ---------------------------------------------------------------------------
# identification of the two linear-term graphs

@dataclass(frozen=True)
class IdentificationReport:
    """How the two linear-term graphs were pinned down.

    The certificate names two 5-vertex graphs only by pictures elsewhere,
    so the build derives them: structural constraints (induced subgraph
    relations plus zero limiting density in pentagon blow-ups) single out
    one candidate each, and a brute-force sweep over all ordered model
    pairs confirms which assignments let the full certificate verify.
    """

    accepted: tuple[str, str]  # (first linear graph6, second linear graph6)
    structural_first: tuple[str, ...]
    structural_second: tuple[str, ...]
    verify_passing: tuple[tuple[str, str], ...]
    confirmed: bool


def identify_linear_graphs() -> IdentificationReport:
    cert = bundled_certificate()
    c5 = cycle(5)
    models = list(census.enumerate_models(5))
    phi0 = {to_graph6(g) for g in models if _phi_c5_zero(g)}

    # second linear graph: induced 5-subgraph of C5 plus an isolated vertex
    host2 = disjoint_union(c5, SmallGraph(1))
    sub2 = _induced_five(host2)
    structural_second = sorted(phi0 & sub2)

    # first linear graph: induced 5-subgraph of C5 with a pendant vertex,
    # distinct from the second graph
    host1 = SmallGraph(6, list(c5.edges()) + [(0, 5)])
    sub1 = _induced_five(host1)
    structural_first = sorted((phi0 & sub1) - set(structural_second))

    # brute-force sweep: which ordered pairs let the certificate pass?
    base_cert = Certificate(
        level=cert.level,
        bound=cert.bound,
        target_graph=cert.target_graph,
        target_coefficient=cert.target_coefficient,
        linear_terms=(),
        sos_blocks=cert.sos_blocks,
    )
    base = expand_lhs(base_cert)
    (c1, c2) = (cert.linear_terms[0][1], cert.linear_terms[1][1])
    passing = []
    for a in models:
        for b in models:
            if a == b:
                continue
            ok = all(
                base[g]
                + (c1 if g == a else 0)
                + (c2 if g == b else 0)
                <= cert.bound
                for g in models
            )
            if ok:
                passing.append((to_graph6(a), to_graph6(b)))
    accepted = (
        to_graph6(cert.linear_terms[0][0]),
        to_graph6(cert.linear_terms[1][0]),
    )
    confirmed = (
        structural_first == [accepted[0]]
        and structural_second == [accepted[1]]
        and accepted in passing
    )
    return IdentificationReport(
        accepted=accepted,
        structural_first=tuple(structural_first),
        structural_second=tuple(structural_second),
        verify_passing=tuple(sorted(passing)),
        confirmed=confirmed,
    )


def _phi_c5_zero(g: SmallGraph) -> bool:
    from .extremal import phi_blowup_density

    return phi_blowup_density(g, cycle(5)) == 0


def _induced_five(host: SmallGraph) -> set[str]:
    return {to_graph6(canonical_form(g)) for g in _five_subgraphs(host)}


def _five_subgraphs(host: SmallGraph):
    import itertools as it

    from .graphs import induced_subgraph

    for verts in it.combinations(range(host.n), 5):
        yield induced_subgraph(host, verts)


# ---------------------------------------------------------------------------
# serialization

def _matrix_to_obj(matrix) -> list[list[str]]:
    return [[format_rational(x) for x in row] for row in matrix]


def _matrix_from_obj(obj) -> tuple[tuple[Fraction, ...], ...]:
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise ValueError("malformed matrix")
    mat = tuple(tuple(parse_rational(x) for x in row) for row in obj)
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix not square")
    for i in range(n):
        for j in range(i):
            if mat[i][j] != mat[j][i]:
                raise ValueError("matrix not symmetric")
    return mat


def _block_to_obj(block: SOSBlock) -> dict:
    return {
        "type": {
            "graph6": to_graph6(block.sigma.graph),
            "size": block.sigma.k,
        },
        "vector": [element_to_obj(entry) for entry in block.vector],
        "matrix": _matrix_to_obj(block.matrix),
    }


def _block_from_obj(obj: dict) -> SOSBlock:
    tobj = obj["type"]
    tgraph = from_graph6(tobj["graph6"])
    if tgraph.n != int(tobj["size"]):
        raise ValueError("type size field disagrees with its graph6")
    if not is_triangle_free(tgraph):
        raise ValueError("type graph is not triangle-free")
    sigma = TypeSigma(tgraph)
    vector = tuple(element_from_obj(v, sigma) for v in obj["vector"])
    matrix = _matrix_from_obj(obj["matrix"])
    return SOSBlock(sigma, vector, matrix)


def save_certificate(cert: Certificate) -> bytes:
    obj = {
        "theory": THEORY,
        "level": cert.level,
        "bound": format_rational(cert.bound),
        "target": {
            "graph6": to_graph6(cert.target_graph),
            "coefficient": format_rational(cert.target_coefficient),
        },
        "linear_terms": [
            {"graph6": to_graph6(g), "coefficient": format_rational(c)}
            for g, c in cert.linear_terms
        ],
        "sos_blocks": [_block_to_obj(b) for b in cert.sos_blocks],
    }
    return (json.dumps(obj, indent=2) + "\n").encode()


def _load_graph(g6: str) -> SmallGraph:
    g = from_graph6(g6)
    if not is_triangle_free(g):
        raise ValueError(f"graph {g6!r} is not triangle-free")
    return g


def load_certificate(data: bytes | str) -> Certificate:
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="strict")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise ValueError(f"malformed certificate file: {e}") from None
    try:
        theory = obj["theory"]
        if theory != THEORY:
            raise ValueError(f"unsupported theory {theory!r}")
        level = int(obj["level"])
        bound = parse_rational(obj["bound"])
        target = obj["target"]
        cert = Certificate(
            level=level,
            bound=bound,
            target_graph=_load_graph(target["graph6"]),
            target_coefficient=parse_rational(target["coefficient"]),
            linear_terms=tuple(
                (_load_graph(t["graph6"]), parse_rational(t["coefficient"]))
                for t in obj["linear_terms"]
            ),
            sos_blocks=tuple(_block_from_obj(b) for b in obj["sos_blocks"]),
        )
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed certificate file: missing or bad field {e}") from None
    return cert
