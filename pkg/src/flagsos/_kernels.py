"""Low-level integer kernels shared by the graph, census, extremal and cut-metric modules.

Every function here is written against plain numpy arrays and compiled with
numba when it is importable. Setting the environment variable
``FLAGSOS_NO_NUMBA=1`` (or uninstalling numba) selects the pure-Python
fallback path: the same source runs unmodified, only slower. ``NUMBA_ENABLED``
reports which path is active.

Conventions:
  - adjacency of a graph on n <= 32 vertices: int64[n] bitmask rows
    (bit u of rows[v] set iff u ~ v);
  - adjacency of a graph on n <= 256 vertices: int64[n, W] rows with 63
    payload bits per word (bit k of word w encodes vertex 63*w + k), which
    keeps every word nonnegative;
  - canonical codes: the upper-triangle adjacency bits in column-major order
    (pair (i, j), i < j, at index j*(j-1)/2 + i), stored one bit per uint8.
    Lexicographic order on these codes equals lexicographic order on graph6
    strings, so "sorted by code" and "sorted by graph6" coincide.
"""

import os

import numpy as np

try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via FLAGSOS_NO_NUMBA instead
    _HAVE_NUMBA = False

NUMBA_ENABLED = _HAVE_NUMBA and os.environ.get("FLAGSOS_NO_NUMBA", "") not in (
    "1",
    "true",
    "yes",
)

WORD_BITS = 63  # payload bits per int64 word; keeps words nonnegative
_MAX_AUTOS = 64


def _jit(fn):
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)
    return fn


def _popcount(x):
    # SWAR popcount for 0 <= x < 2**63
    x = x - ((x >> 1) & 0x5555555555555555)
    x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
    x = x + (x >> 8)
    x = x + (x >> 16)
    x = x + (x >> 32)
    return x & 0x7F


_popcount = _jit(_popcount)


def _ctz(x):
    # index of least significant set bit; x > 0
    return _popcount((x & -x) - 1)


_ctz = _jit(_ctz)


def leaf_code(vord, rows, n, out):
    """Write the adjacency code of the relabeling position i -> vord[i]."""
    idx = 0
    for j in range(1, n):
        vj = vord[j]
        for i in range(j):
            out[idx] = (rows[vord[i]] >> vj) & 1
            idx += 1


leaf_code = _jit(leaf_code)


def _cmp_seg(a, b, lo, hi):
    for t in range(lo, hi):
        if a[t] < b[t]:
            return -1
        if a[t] > b[t]:
            return 1
    return 0


_cmp_seg = _jit(_cmp_seg)


def canon_perm_exhaustive(rows, n):
    """Permutation minimizing the adjacency code, by pruned DFS over all n!.

    Intended for n <= 8 where the search is exact and cheap.
    """
    T = n * (n - 1) // 2
    best = np.empty(T, np.uint8)
    cur = np.empty(T, np.uint8)
    bestperm = np.empty(n, np.int32)
    vord = np.empty(n, np.int32)
    for i in range(n):
        vord[i] = i
        bestperm[i] = i
    leaf_code(vord, rows, n, best)

    used = np.zeros(n, np.uint8)
    nexti = np.zeros(n + 1, np.int32)
    less = np.zeros(n + 1, np.uint8)  # cur strictly below best before depth d
    d = 0
    while d >= 0:
        if d == n:
            if less[n] == 1:
                for t in range(T):
                    best[t] = cur[t]
                for i in range(n):
                    bestperm[i] = vord[i]
                for i in range(n + 1):
                    less[i] = 0
            d -= 1
            if d >= 0:
                used[vord[d]] = 0
                nexti[d] += 1
            continue
        v = nexti[d]
        while v < n and used[v] == 1:
            v += 1
        if v >= n:
            d -= 1
            if d >= 0:
                used[vord[d]] = 0
                nexti[d] += 1
            continue
        nexti[d] = v
        vord[d] = v
        used[v] = 1
        base = d * (d - 1) // 2
        for i in range(d):
            cur[base + i] = (rows[vord[i]] >> v) & 1
        ok = True
        if less[d] == 1:
            less[d + 1] = 1
        else:
            c = _cmp_seg(cur, best, base, base + d)
            if c > 0:
                ok = False
            else:
                less[d + 1] = 1 if c < 0 else 0
        if ok:
            d += 1
            nexti[d] = 0
        else:
            used[v] = 0
            nexti[d] += 1
    return bestperm


canon_perm_exhaustive = _jit(canon_perm_exhaustive)


def _refine(vord, cstart, rows, n):
    """Equitable (degree-based) refinement of the ordered partition, in place.

    vord lists vertices; cstart[i] = 1 iff position i starts a cell. Cells are
    repeatedly split by neighbor counts into earlier cells, ascending-key
    order, until stable. The splitting sequence depends only on positions and
    counts, so isomorphic inputs refine in parallel.
    """
    key = np.empty(n, np.int64)
    changed = True
    while changed:
        changed = False
        s = 0
        while s < n:
            e = s + 1
            while e < n and cstart[e] == 0:
                e += 1
            smask = 0
            for t in range(s, e):
                smask |= 1 << vord[t]
            a = 0
            while a < n:
                b = a + 1
                while b < n and cstart[b] == 0:
                    b += 1
                if b - a > 1:
                    differ = False
                    k0 = _popcount(rows[vord[a]] & smask)
                    for t in range(a + 1, b):
                        if _popcount(rows[vord[t]] & smask) != k0:
                            differ = True
                            break
                    if differ:
                        for t in range(a, b):
                            key[t] = _popcount(rows[vord[t]] & smask)
                        for t in range(a + 1, b):
                            kv = key[t]
                            vv = vord[t]
                            u = t - 1
                            while u >= a and key[u] > kv:
                                key[u + 1] = key[u]
                                vord[u + 1] = vord[u]
                                u -= 1
                            key[u + 1] = kv
                            vord[u + 1] = vv
                        for t in range(a + 1, b):
                            if key[t] != key[t - 1]:
                                cstart[t] = 1
                                changed = True
                a = b
            s = e
    return 0


_refine = _jit(_refine)


def canon_perm_refine(rows, n):
    """Permutation minimizing the adjacency code via refinement + backtracking.

    Individualization-refinement over an explicit stack. Automorphisms found
    at leaves sharing the first leaf's code drive orbit pruning; a node only
    uses automorphisms fixing every vertex individualized on its path, which
    keeps the search exact. Exact for any n <= 32; used where exhausting all
    n! permutations is infeasible.
    """
    T = n * (n - 1) // 2
    vords = np.empty((n + 1, n), np.int32)
    cstarts = np.zeros((n + 1, n), np.uint8)
    cands = np.empty((n + 1, n), np.int32)
    ncand = np.zeros(n + 1, np.int32)
    candidx = np.zeros(n + 1, np.int32)
    tried = np.empty((n + 1, n), np.int32)
    ntried = np.zeros(n + 1, np.int32)
    indiv = np.zeros(n + 1, np.int32)

    cur = np.empty(T, np.uint8)
    best = np.empty(T, np.uint8)
    first = np.empty(T, np.uint8)
    bestperm = np.empty(n, np.int32)
    firstperm = np.empty(n, np.int32)
    have_best = 0
    have_first = 0
    nauto = 0
    autos = np.zeros(_MAX_AUTOS * n, np.int32)
    uf = np.empty(n, np.int32)

    for i in range(n):
        vords[0, i] = i
        bestperm[i] = i
    cstarts[0, 0] = 1
    _refine(vords[0], cstarts[0], rows, n)

    d = 0
    entering = True
    while d >= 0:
        if entering:
            entering = False
            discrete = True
            for i in range(1, n):
                if cstarts[d, i] == 0:
                    discrete = False
                    break
            if discrete:
                leaf_code(vords[d], rows, n, cur)
                if have_first == 0:
                    have_first = 1
                    for t in range(T):
                        first[t] = cur[t]
                    for i in range(n):
                        firstperm[i] = vords[d, i]
                elif nauto < _MAX_AUTOS and _cmp_seg(cur, first, 0, T) == 0:
                    base = nauto * n
                    for i in range(n):
                        autos[base + firstperm[i]] = vords[d, i]
                    nauto += 1
                if have_best == 0 or _cmp_seg(cur, best, 0, T) < 0:
                    have_best = 1
                    for t in range(T):
                        best[t] = cur[t]
                    for i in range(n):
                        bestperm[i] = vords[d, i]
                d -= 1
                continue
            # first smallest non-singleton cell becomes the branch cell
            tlo = 0
            thi = 0
            bestsz = n + 1
            a = 0
            while a < n:
                b = a + 1
                while b < n and cstarts[d, b] == 0:
                    b += 1
                if b - a > 1 and b - a < bestsz:
                    bestsz = b - a
                    tlo = a
                    thi = b
                a = b
            k = 0
            for t in range(tlo, thi):
                cands[d, k] = vords[d, t]
                k += 1
            ncand[d] = k
            candidx[d] = 0
            ntried[d] = 0

        # resume node d: next unpruned candidate
        v = -1
        while candidx[d] < ncand[d]:
            c = cands[d, candidx[d]]
            candidx[d] += 1
            if ntried[d] > 0 and nauto > 0:
                for i in range(n):
                    uf[i] = i
                for ai in range(nauto):
                    base = ai * n
                    fixes = True
                    for pi in range(d):
                        if autos[base + indiv[pi]] != indiv[pi]:
                            fixes = False
                            break
                    if not fixes:
                        continue
                    for x in range(n):
                        y = autos[base + x]
                        rx = x
                        while uf[rx] != rx:
                            rx = uf[rx]
                        ry = y
                        while uf[ry] != ry:
                            ry = uf[ry]
                        if rx != ry:
                            uf[rx] = ry
                rv = c
                while uf[rv] != rv:
                    rv = uf[rv]
                pruned = False
                for ti in range(ntried[d]):
                    ru = tried[d, ti]
                    while uf[ru] != ru:
                        ru = uf[ru]
                    if ru == rv:
                        pruned = True
                        break
                if pruned:
                    continue
            v = c
            break
        if v < 0:
            d -= 1
            continue
        tried[d, ntried[d]] = v
        ntried[d] += 1
        indiv[d] = v

        # child state: v moved to the front of its cell and split off
        tlo = 0
        for t in range(n):
            if cands[d, 0] == vords[d, t]:
                tlo = t
                break
        pos = tlo
        for t in range(tlo, n):
            if vords[d, t] == v:
                pos = t
                break
        for i in range(n):
            vords[d + 1, i] = vords[d, i]
            cstarts[d + 1, i] = cstarts[d, i]
        t = pos
        while t > tlo:
            vords[d + 1, t] = vords[d + 1, t - 1]
            t -= 1
        vords[d + 1, tlo] = v
        cstarts[d + 1, tlo + 1] = 1
        _refine(vords[d + 1], cstarts[d + 1], rows, n)
        d += 1
        entering = True
    return bestperm


canon_perm_refine = _jit(canon_perm_refine)


def child_codes(rows, p, out):
    """Canonical codes of all one-vertex triangle-free extensions of a parent.

    The parent on p vertices is extended by vertex p joined to every
    independent subset; out must be uint8[2**p, p*(p+1)//2]. Returns the number
    of children written. Children of size <= 8 use the exhaustive scheme,
    larger ones the refinement scheme, matching the dispatch in canon_perm.
    """
    m = p + 1
    crows = np.empty(m, np.int64)
    k = 0
    for mask in range(1 << p):
        ok = True
        mm = mask
        while mm != 0:
            v = _ctz(mm)
            mm &= mm - 1
            if rows[v] & mask != 0:
                ok = False
                break
        if not ok:
            continue
        for v in range(p):
            crows[v] = rows[v] | (((mask >> v) & 1) << p)
        crows[p] = mask
        if m <= 8:
            perm = canon_perm_exhaustive(crows, m)
        else:
            perm = canon_perm_refine(crows, m)
        leaf_code(perm, crows, m, out[k])
        k += 1
    return k


child_codes = _jit(child_codes)


def pentagon_count(rows, n):
    """Number of 5-cycles in a triangle-free graph on n <= 256 vertices.

    rows: int64[n, W] bitset rows with 63 payload bits per word. Walks
    v-x1-x2-x3-x4-v are rooted at the cycle minimum v and counted once by
    requiring x1 < x4. Triangle-freeness makes every 5-cycle induced and
    chordless, so no extra adjacency exclusions are needed.
    """
    W = rows.shape[1]
    total = 0
    m63 = (1 << WORD_BITS) - 1
    for v in range(n):
        wv = v // WORD_BITS
        bv = v % WORD_BITS
        for w1 in range(wv, W):
            gt1 = (~((1 << (bv + 1)) - 1)) & m63 if w1 == wv else m63
            a1 = rows[v, w1] & gt1
            while a1 != 0:
                b1 = _ctz(a1)
                a1 &= a1 - 1
                x1 = w1 * WORD_BITS + b1
                for w2 in range(wv, W):
                    gt2 = (~((1 << (bv + 1)) - 1)) & m63 if w2 == wv else m63
                    a2 = rows[x1, w2] & gt2
                    while a2 != 0:
                        b2 = _ctz(a2)
                        a2 &= a2 - 1
                        x2 = w2 * WORD_BITS + b2
                        # x2 == v impossible: x2 > v
                        for w3 in range(wv, W):
                            gt3 = (~((1 << (bv + 1)) - 1)) & m63 if w3 == wv else m63
                            a3 = rows[x2, w3] & gt3
                            while a3 != 0:
                                b3 = _ctz(a3)
                                a3 &= a3 - 1
                                x3 = w3 * WORD_BITS + b3
                                if x3 == x1:
                                    continue
                                # x4 adjacent to both x3 and v, x4 > x1, x4 != x2
                                wx1 = x1 // WORD_BITS
                                bx1 = x1 % WORD_BITS
                                wx2 = x2 // WORD_BITS
                                bx2 = x2 % WORD_BITS
                                for w4 in range(wx1, W):
                                    mm = rows[x3, w4] & rows[v, w4]
                                    if w4 == wx1:
                                        mm &= (~((1 << (bx1 + 1)) - 1)) & m63
                                    if w4 == wx2:
                                        mm &= ~(1 << bx2)
                                    total += _popcount(mm & m63)
    return total


pentagon_count = _jit(pentagon_count)


def strong_hom_count(hrows, m, grows, n):
    """Number of maps V(H) -> V(G) preserving both edges and non-edges.

    Bitmask DFS; vertices of H are assigned in index order. n <= 32.
    """
    full = (1 << n) - 1
    cand = np.empty(m, np.int64)
    assign = np.empty(m, np.int32)
    cand[0] = full
    d = 0
    count = 0
    while d >= 0:
        if cand[d] == 0:
            d -= 1
            continue
        w = _ctz(cand[d])
        cand[d] &= cand[d] - 1
        assign[d] = w
        if d == m - 1:
            count += 1
            continue
        nc = full
        for u in range(d + 1):
            if (hrows[u] >> (d + 1)) & 1:
                nc &= grows[assign[u]]
            else:
                nc &= full & ~grows[assign[u]]
            if nc == 0:
                break
        d += 1
        cand[d] = nc
    return count


strong_hom_count = _jit(strong_hom_count)


def cutnorm_core(A, n):
    """max over S,T of |sum_{i in S, j in T} A[i,j]| for an int64 matrix.

    Iterates S in Gray-code order keeping column sums incremental; for fixed S
    the optimal T takes exactly the columns whose partial sum has the right
    sign. Returns (value, S bitmask, T bitmask) with the first maximizer found.
    """
    col = np.zeros(n, np.int64)
    best = 0
    bS = 0
    bT = 0
    S = 0
    for k in range(1, 1 << n):
        fl = _ctz(k)
        S ^= 1 << fl
        if (S >> fl) & 1:
            for j in range(n):
                col[j] += A[fl, j]
        else:
            for j in range(n):
                col[j] -= A[fl, j]
        pos = 0
        neg = 0
        for j in range(n):
            c = col[j]
            if c > 0:
                pos += c
            elif c < 0:
                neg -= c
        if pos > best:
            best = pos
            bS = S
            bT = 0
            for j in range(n):
                if col[j] > 0:
                    bT |= 1 << j
        if neg > best:
            best = neg
            bS = S
            bT = 0
            for j in range(n):
                if col[j] < 0:
                    bT |= 1 << j
    return best, bS, bT


cutnorm_core = _jit(cutnorm_core)


def min_relabel_cutnorm(A1, A2, perms, n):
    """min over the given relabelings p of max rectangle mass of A1 - p(A2).

    perms: int32[P, n] permutations applied to A2 (row/col relabeling).
    Returns the minimal cut value (unnormalized int64).
    """
    D = np.empty((n, n), np.int64)
    best = -1
    for pi in range(perms.shape[0]):
        for i in range(n):
            for j in range(n):
                D[i, j] = A1[i, j] - A2[perms[pi, i], perms[pi, j]]
        v, _, _ = cutnorm_core(D, n)
        if best < 0 or v < best:
            best = v
            if best == 0:
                break
    return best


min_relabel_cutnorm = _jit(min_relabel_cutnorm)


def warmup():
    """Compile (or no-op) the kernels on tiny inputs; returns True."""
    rows = np.zeros(5, np.int64)
    rows[0] = 0b00110
    rows[1] = 0b01001
    rows[2] = 0b10001
    rows[3] = 0b10010
    rows[4] = 0b01100
    canon_perm_exhaustive(rows, 5)
    canon_perm_refine(rows, 5)
    out = np.empty((1 << 5, 15), np.uint8)
    child_codes(rows, 5, out)
    wide = np.zeros((5, 1), np.int64)
    for v in range(5):
        wide[v, 0] = rows[v]
    pentagon_count(wide, 5)
    strong_hom_count(rows, 5, rows, 5)
    A = np.ones((3, 3), np.int64)
    cutnorm_core(A, 3)
    p = np.zeros((1, 3), np.int32)
    p[0, 1] = 1
    p[0, 2] = 2
    min_relabel_cutnorm(A, A, p, 3)
    return True
