"""Independent reference implementations used only by the tests.

They work on plain Python sets and ``itertools`` so they share no code
with the bitset machinery under test.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import ceil

import numpy as np


def adjacency(g):
    """``{(part, i): set of opposite indices}`` from the public edge list."""
    adj = {(1, i): set() for i in range(g.size1)}
    adj.update({(2, j): set() for j in range(g.size2)})
    for i, j in g.edges():
        adj[(1, i)].add(j)
        adj[(2, j)].add(i)
    return adj


def subsets_in_order(m, max_size):
    for s in range(1, max_size + 1):
        yield from combinations(range(m), s)


def oracle_deficiency(adj, forward, pattern_edges, part, X, D):
    """``|N(X) minus image| - sum (D - deg_F) - |image & X|``."""
    image = {(h[0], h[1]) for h in forward.values()}
    deg = {}
    for u, v in pattern_edges:
        deg[tuple(u)] = deg.get(tuple(u), 0) + 1
        deg[tuple(v)] = deg.get(tuple(v), 0) + 1
    pre = {(h[0], h[1]): (p[0], p[1]) for p, h in forward.items()}
    nbhd = set()
    for x in X:
        nbhd |= adj[(part, x)]
    other = 3 - part
    fresh = sum(1 for y in nbhd if (other, y) not in image)
    budget = 0
    occupied = 0
    for x in X:
        p = pre.get((part, x))
        budget += D - (deg.get(p, 0) if p is not None else 0)
        occupied += (part, x) in image
    return fresh - budget - occupied


def oracle_verify_good(g, adj, forward, pattern_edges, n, D):
    """First ``(part, X, R)`` with ``R < 0`` by (size, part, lex), or ``None``."""
    for s in range(1, n + 1):
        for part in (1, 2):
            m = g.size(part)
            if s > m:
                continue
            for X in combinations(range(m), s):
                r = oracle_deficiency(adj, forward, pattern_edges, part, X, D)
                if r < 0:
                    return part, X, r
    return None


def oracle_expanding(adj, sizes, n, D):
    for s in range(1, n + 1):
        for part in (1, 2):
            for X in combinations(range(sizes[part - 1]), s):
                nb = set().union(*(adj[(part, x)] for x in X))
                if len(nb) < D * s:
                    return part, X
    return None


def oracle_empty_pairs(g, a):
    """All empty pairs ``(A, B)`` with ``|A|, |B| >= a`` (any size)."""
    adj = adjacency(g)
    out = []
    for s in range(a, g.size1 + 1):
        for A in combinations(range(g.size1), s):
            nb = set().union(*(adj[(1, x)] for x in A))
            free = [j for j in range(g.size2) if j not in nb]
            if len(free) >= a:
                out.append((A, tuple(free)))
    return out


def oracle_alpha_joined(g, alpha):
    a = ceil(Fraction(alpha) * g.size1)
    return not oracle_empty_pairs(g, a)


def oracle_extraction_bullets(gp, alpha, N):
    """Failing bullet names on ``G'`` by direct set enumeration."""
    alpha = Fraction(alpha)
    a = ceil(alpha * N)
    small = (1 - 4 * alpha) / (2 * alpha)
    big = (1 - 2 * alpha) * N
    exp_n = int(6 * alpha * N)
    exp_D = (1 - 2 * alpha) / (6 * alpha)
    adj = adjacency(gp)
    failed = set()
    for part in (1, 2):
        m = gp.size(part)
        for s in range(1, m + 1):
            for X in combinations(range(m), s):
                nb = len(set().union(*(adj[(part, x)] for x in X)))
                if s <= a and not nb > small * s:
                    failed.add("small_sets")
                if s > a and not nb > big:
                    failed.add("large_sets")
                if s <= exp_n and not nb >= exp_D * s:
                    failed.add("expanding")
    return failed


def oracle_discrepancy(g, p, t):
    """Max relative deviation and its first worst pair over all ``|U|, |W| >= t``.

    Order: ``|U|``, ``U`` lex, ``|W|``, ``W`` lex; vectorised over ``W``.
    """
    N = g.size1
    M = g.matrix.astype(np.int64)
    Ws = [W for s in range(t, N + 1) for W in combinations(range(N), s)]
    Wmat = np.zeros((len(Ws), N), dtype=np.int64)
    for k, W in enumerate(Ws):
        Wmat[k, list(W)] = 1
    wsize = Wmat.sum(axis=1)
    best, worst = -1.0, None
    for s in range(t, N + 1):
        for U in combinations(range(N), s):
            col = M[list(U)].sum(axis=0)
            e = Wmat @ col
            expected = p * s * wsize
            dev = np.abs(e - expected) / expected
            k = int(np.argmax(dev))
            if dev[k] > best:
                best, worst = float(dev[k]), (U, Ws[k])
    return best, worst
