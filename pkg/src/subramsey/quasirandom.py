"""Seeded binomial random bipartite hosts and post-hoc quasirandomness certificates.

Host sampling is counter based: row ``i`` of the biadjacency matrix is drawn
from a Philox stream keyed by the seed with ``i`` in the counter, so a row
never depends on which other rows were drawn or in what order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .bigraph import BipartiteGraph, Budget, VertexSet, iter_bits, mask_of

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class QuasiParams:
    N: int
    p: float
    epsilon: float = 0.5
    delta: float = 1.5
    c3n: int = 1

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError("p must lie in (0, 1]")
        if not 0 < self.epsilon <= 0.5:
            raise ValueError("epsilon must lie in (0, 1/2]")
        if not 0 < self.delta <= 1.5:
            raise ValueError("delta must lie in (0, 3/2]")
        if not 1 <= self.c3n <= self.N:
            raise ValueError("c3n must lie in [1, N]")


@dataclass
class DiscrepancyReport:
    checked_pairs: int
    max_relative_deviation: float
    worst_U: VertexSet | None
    worst_W: VertexSet | None
    mode: str
    passed: bool

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "max_deviation": self.max_relative_deviation,
            "worst_U": list(self.worst_U.members) if self.worst_U else None,
            "worst_W": list(self.worst_W.members) if self.worst_W else None,
            "checked_pairs": self.checked_pairs,
            "mode": self.mode,
        }


def _row_generator(seed: int, row: int) -> np.random.Generator:
    key = seed & _MASK64
    # row index sits in the second counter word; draws advance the first
    return np.random.Generator(np.random.Philox(key=key, counter=row << 64))


def _sample_rows(N: int, p: float, seed: int, rows: range) -> list[int]:
    out = []
    for i in rows:
        u = _row_generator(seed, i).random(N)
        bits = np.packbits(u < p, bitorder="little")
        out.append(int.from_bytes(bits.tobytes(), "little"))
    return out


def sample_host(N: int, p: float, seed: int, jobs: int = 1) -> BipartiteGraph:
    """Draw G(N, N, p); identical ``(N, p, seed)`` always give the same graph."""
    if N < 1:
        raise ValueError("N must be positive")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if jobs <= 1:
        rows1 = _sample_rows(N, p, seed, range(N))
    else:
        step = -(-N // jobs)
        blocks = [range(s, min(N, s + step)) for s in range(0, N, step)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(lambda b: _sample_rows(N, p, seed, b), blocks)
        rows1 = [m for block in parts for m in block]
    rows2 = [0] * N
    for i, m in enumerate(rows1):
        bit = 1 << i
        for j in iter_bits(m):
            rows2[j] |= bit
    return BipartiteGraph(N, N, rows1, rows2)


def density_window(q: QuasiParams, n: int) -> tuple[float, float]:
    slack = float(n) ** (q.epsilon - 0.5)
    base = q.p * q.N * q.N
    return (1 - slack) * base, (1 + slack) * base


def check_density(g: BipartiteGraph, q: QuasiParams, n: int):
    """Return ``(ok, e(G), window)`` for the global edge-count window."""
    if g.size1 != q.N or g.size2 != q.N:
        raise ValueError("host part sizes must equal q.N")
    lo, hi = density_window(q, n)
    e = g.num_edges
    return lo <= e <= hi, e, (lo, hi)


def _deviation(e, expected):
    return abs(e - expected) / expected


def check_discrepancy(
    g: BipartiteGraph,
    q: QuasiParams,
    mode: str = "exhaustive",
    *,
    trials: int = 10_000,
    seed: int = 0,
    budget: int | None = None,
) -> DiscrepancyReport:
    """Largest relative deviation ``|e(U,W) - p|U||W|| / (p|U||W|)`` over big pairs.

    Exhaustive mode enumerates every part-1 set ``U`` with ``|U| >= c3n``;
    for a fixed ``U`` and size ``w`` the extreme values of ``e(U, W)`` come
    from the ``w`` part-2 vertices with the most (or fewest) neighbours in
    ``U``, so all ``W`` are covered without listing them.  The budget counts
    enumerated ``U`` sets.  The reported worst pair is the first maximum in
    (|U|, U lex, |W|, W lex) order.
    """
    if g.size1 != q.N or g.size2 != q.N:
        raise ValueError("host part sizes must equal q.N")
    if mode == "sampled":
        return _discrepancy_sampled(g, q, trials, seed)
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    N, p, t = q.N, q.p, q.c3n
    n_sets = sum(comb(N, u) for u in range(t, N + 1))
    Budget(budget).reserve(n_sets, "U-sets")
    rows2 = g.rows(2)
    best = -1.0
    worst = None
    for u in range(t, N + 1):
        for U in combinations(range(N), u):
            umask = mask_of(U)
            c = [(r & umask).bit_count() for r in rows2]
            hi_order = sorted(range(N), key=lambda j: (-c[j], j))
            lo_order = sorted(range(N), key=lambda j: (c[j], j))
            hi_sum = lo_sum = 0
            for w in range(1, N + 1):
                hi_sum += c[hi_order[w - 1]]
                lo_sum += c[lo_order[w - 1]]
                if w < t:
                    continue
                expected = p * u * w
                d_hi = _deviation(hi_sum, expected)
                d_lo = _deviation(lo_sum, expected)
                if d_hi > d_lo or (d_hi == d_lo and sorted(hi_order[:w]) <= sorted(lo_order[:w])):
                    d, W = d_hi, hi_order[:w]
                else:
                    d, W = d_lo, lo_order[:w]
                if d > best:
                    best, worst = d, (U, tuple(W))
    U, W = worst
    return DiscrepancyReport(
        n_sets * n_sets, best, VertexSet(1, U), VertexSet(2, W), "exhaustive", best <= q.delta
    )


def _discrepancy_sampled(g, q, trials, seed) -> DiscrepancyReport:
    rng = np.random.Generator(np.random.Philox(key=seed & _MASK64))
    N, p, t = q.N, q.p, q.c3n
    rows1 = g.rows(1)
    best = -1.0
    worst = None
    for _ in range(trials):
        u = int(rng.integers(t, N + 1))
        w = int(rng.integers(t, N + 1))
        U = tuple(sorted(int(x) for x in rng.choice(N, u, replace=False)))
        W = tuple(sorted(int(x) for x in rng.choice(N, w, replace=False)))
        wmask = mask_of(W)
        e = sum((rows1[i] & wmask).bit_count() for i in U)
        d = _deviation(e, p * u * w)
        if d > best:
            best, worst = d, (U, W)
    U, W = worst if worst else ((), ())
    return DiscrepancyReport(trials, best, VertexSet(1, U), VertexSet(2, W), "sampled", best <= q.delta)
