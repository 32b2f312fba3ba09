"""Exact cut norm and cut distances for small graphs.

The cut norm of an n x n matrix is (1/n^2) max_{S,T} |sum_{i in S, j in T}
A[i,j]|.  For a fixed S the optimal T just keeps the columns whose partial
sums are positive (or negative, for the minimizing side), so the search is
2^n subsets times n column updates instead of 4^n.  Everything is exact:
rational inputs are scaled to integers, and results come back as
fractions.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import lcm

import numpy as np

from . import _kernels
from .extremal import BlowupSpec, blowup
from .graphs import Rational, SmallGraph, canonical_form

CUT_NORM_MAX = 20
DELTA_HAT_MAX = 9


def _to_int_matrix(A) -> tuple[np.ndarray, int]:
    """Scale a rational matrix to int64 by the lcm of denominators."""
    rows = [list(r) for r in A]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix not square")
    denom = 1
    for r in rows:
        for x in r:
            denom = lcm(denom, Fraction(x).denominator)
    out = np.empty((n, n), np.int64)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            q = Fraction(x) * denom
            out[i, j] = int(q)
    return out, denom


def cut_norm_witness(A) -> tuple[Fraction, int, int]:
    """Cut norm plus maximizing row set S and column set T as bitmasks."""
    M, denom = _to_int_matrix(A)
    n = M.shape[0]
    if n > CUT_NORM_MAX:
        raise ValueError(f"cut norm supports n <= {CUT_NORM_MAX} exactly, got {n}")
    if n == 0:
        return Fraction(0), 0, 0
    best, s_mask, t_mask = _kernels.cutnorm_core(M, n)
    return Fraction(int(best), denom * n * n), int(s_mask), int(t_mask)


def cut_norm(A) -> Fraction:
    return cut_norm_witness(A)[0]


def adjacency_matrix(g: SmallGraph) -> list[list[int]]:
    return [[g.rows[i] >> j & 1 for j in range(g.n)] for i in range(g.n)]


def _diff_matrix(g1: SmallGraph, g2: SmallGraph) -> np.ndarray:
    n = g1.n
    D = np.zeros((n, n), np.int64)
    for i in range(n):
        for j in range(n):
            D[i, j] = (g1.rows[i] >> j & 1) - (g2.rows[i] >> j & 1)
    return D


def d_box(g1: SmallGraph, g2: SmallGraph) -> Fraction:
    """Cut distance of two graphs sharing one labeling of [n]."""
    if g1.n != g2.n:
        raise ValueError(f"graphs have different sizes {g1.n} and {g2.n}")
    return cut_norm(_diff_matrix(g1, g2))


def delta_hat(g1: SmallGraph, g2: SmallGraph) -> Fraction:
    """Minimum of d_box over all relabelings of the second graph.

    A pseudometric at equal sizes: zero exactly on isomorphic pairs.
    """
    n = g1.n
    if n != g2.n:
        raise ValueError(f"graphs have different sizes {n} and {g2.n}")
    if n > DELTA_HAT_MAX:
        raise ValueError(f"delta_hat supports n <= {DELTA_HAT_MAX} exactly, got {n}")
    if canonical_form(g1) == canonical_form(g2):
        return Fraction(0)
    A1 = np.array([[g1.rows[i] >> j & 1 for j in range(n)] for i in range(n)], np.int64)
    A2 = np.array([[g2.rows[i] >> j & 1 for j in range(n)] for i in range(n)], np.int64)
    perms = np.array(list(itertools.permutations(range(n))), np.int32)
    best = _kernels.min_relabel_cutnorm(A1, A2, perms, n)
    return Fraction(int(best), n * n)


def delta_blowup_sequence(
    g1: SmallGraph, g2: SmallGraph, k_max: int
) -> list[Fraction]:
    """Finite prefix of delta_hat over co-scaled balanced blow-ups.

    Entry k compares g1 blown up by n2*k with g2 blown up by n1*k, both on
    n1*n2*k vertices.  Reported as data; no limit is extrapolated.
    """
    n1, n2 = g1.n, g2.n
    if n1 == 0 or n2 == 0:
        raise ValueError("blow-up sequence needs nonempty graphs")
    out = []
    for k in range(1, k_max + 1):
        size = n1 * n2 * k
        if size > DELTA_HAT_MAX:
            raise ValueError(
                f"step k={k} needs {size} vertices, beyond the exact"
                f" delta_hat regime {DELTA_HAT_MAX}"
            )
        b1 = blowup(BlowupSpec(g1, (n2 * k,) * n1))
        b2 = blowup(BlowupSpec(g2, (n1 * k,) * n2))
        out.append(delta_hat(b1, b2))
    return out
