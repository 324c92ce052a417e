"""Alpha-joinedness certificates and expander extraction.

A host with equal parts of size ``N`` is alpha-joined when every pair of
opposite-part sets of size at least ``a = ceil(alpha N)`` spans an edge.
Every set size written as ``alpha N`` in the underlying argument is rounded
up to ``a`` here.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, floor

import numpy as np

from .bigraph import (
    BipartiteGraph,
    Budget,
    Verdict,
    VertexSet,
    as_fraction,
    iter_bits,
    lex_unions,
    mask_of,
)
from .errors import InsufficientYSpace, RemovalOverflow
from .goodembed import Embedding, null_embedding


def alpha_size(alpha, N: int) -> int:
    """``ceil(alpha * N)`` computed exactly."""
    return ceil(as_fraction(alpha) * N)


def _equal_parts(g: BipartiteGraph) -> int:
    if g.size1 != g.size2:
        raise ValueError("host parts must have equal size")
    return g.size1


@dataclass
class JoinednessVerdict:
    alpha: float
    joined: bool
    witness_A: VertexSet | None = None
    witness_B: VertexSet | None = None
    checked: int = 0

    def __bool__(self):
        return self.joined

    def to_json(self):
        return {
            "alpha": float(self.alpha),
            "joined": self.joined,
            "witness_A": list(self.witness_A.members) if self.witness_A else None,
            "witness_B": list(self.witness_B.members) if self.witness_B else None,
            "checked": self.checked,
        }


def is_alpha_joined(g: BipartiteGraph, alpha, *, budget: int | None = None) -> JoinednessVerdict:
    """Exact check over all part-1 sets ``A`` of size ``a``.

    Pairs of exact size suffice: a larger empty pair contains one.  For each
    ``A`` (lexicographic order) the part-2 non-neighbours are read off the
    union of neighbourhoods, so the first hit gives the lexicographically
    least witness ``(A, B)``.
    """
    N = _equal_parts(g)
    a = alpha_size(alpha, N)
    if a < 1:
        raise ValueError("ceil(alpha N) must be at least 1")
    if a > N:
        return JoinednessVerdict(alpha, True)
    # a set's non-neighbours sit inside any one member's non-neighbours
    for part in (1, 2):
        if all(N - d < a for d in g.degrees(part)):
            return JoinednessVerdict(alpha, True, checked=N)
    Budget(budget).reserve(comb(N, a), "A-sets")
    full2 = g.full_mask(2)
    checked = 0
    for A, u in lex_unions(list(range(N)), list(g.rows(1)), a):
        checked += 1
        missing = full2 & ~u
        if missing.bit_count() >= a:
            B = list(iter_bits(missing))[:a]
            return JoinednessVerdict(alpha, False, VertexSet(1, A), VertexSet(2, B), checked)
    return JoinednessVerdict(alpha, True, checked=checked)


# -- extraction ------------------------------------------------------------

@dataclass
class RemovalStep:
    part: int
    removed: VertexSet
    neighborhood_size: int

    def to_json(self):
        return {"part": self.part, "removed": list(self.removed.members), "neighborhood_size": self.neighborhood_size}


@dataclass
class ExtractionResult:
    N: int
    alpha: float
    a: int
    kept1: VertexSet
    kept2: VertexSet
    removed1: VertexSet
    removed2: VertexSet
    Y1: VertexSet
    Y2: VertexSet
    Y1prime: VertexSet
    Y2prime: VertexSet
    removal_log: list = field(default_factory=list)
    search_cap: int | None = None
    graph: BipartiteGraph | None = field(default=None, repr=False, compare=False)

    def subgraph(self):
        """``(G', map1, map2)``: the induced graph on the kept sets, re-indexed."""
        return self.graph.induced(self.kept1.members, self.kept2.members)

    def kept(self, part):
        return self.kept1 if part == 1 else self.kept2

    def removed(self, part):
        return self.removed1 if part == 1 else self.removed2

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "alpha": float(self.alpha),
            "a": self.a,
            "kept1": list(self.kept1.members),
            "kept2": list(self.kept2.members),
            "removed1": list(self.removed1.members),
            "removed2": list(self.removed2.members),
            "Y1": list(self.Y1.members),
            "Y2": list(self.Y2.members),
            "Y1prime": list(self.Y1prime.members),
            "Y2prime": list(self.Y2prime.members),
            "removal_log": [s.to_json() for s in self.removal_log],
            "search_cap": self.search_cap,
        }


def _choose_Y(N, a, y_seed):
    if y_seed is None or y_seed == "first":
        return list(range(2 * a)), list(range(2 * a))
    rng = random.Random(y_seed)
    return sorted(rng.sample(range(N), 2 * a)), sorted(rng.sample(range(N), 2 * a))


def _find_violator(g, alive, ymask, ratio, a, cap, budget):
    """First ``X`` (by size, part, lex) in the residual graph with
    ``|N(X) \\ (Y1 u Y2)| <= ratio |X|``, or ``None``."""
    top = a if cap is None else min(a, cap)
    bud = Budget(budget)
    cand = {}
    for part in (1, 2):
        o = 2 - part
        items = list(iter_bits(alive[part - 1]))
        rows = g.rows(part)
        masks = [rows[i] & alive[o] & ~ymask[o] for i in items]
        cand[part] = (items, masks, min((m.bit_count() for m in masks), default=0))
    for s in range(1, top + 1):
        for part in (1, 2):
            items, masks, min_f = cand[part]
            if s > len(items) or min_f > ratio * s:
                continue
            bud.reserve(comb(len(items), s))
            for X, u in lex_unions(items, masks, s):
                size = u.bit_count()
                if size <= ratio * s:
                    return part, X, size
    return None


def _overflow_witness(g, part, removed_mask, a):
    """Empty ``(A, B)`` pair read off an oversized removed set, if any."""
    members = list(iter_bits(removed_mask))[:a]
    rows = g.rows(part)
    u = 0
    for x in members:
        u |= rows[x]
    missing = g.full_mask(3 - part) & ~u
    if missing.bit_count() < a:
        return None
    other_side = list(iter_bits(missing))[:a]
    if part == 1:
        return VertexSet(1, members), VertexSet(2, other_side)
    return VertexSet(1, other_side), VertexSet(2, members)


def extract_expander(
    g: BipartiteGraph,
    alpha,
    y_seed="first",
    *,
    max_size: int | None = None,
    budget: int | None = None,
) -> ExtractionResult:
    """Iteratively delete sparse sets until none remain.

    ``Y_i`` holds ``2a`` vertices of part ``i`` (the first ones, or a seeded
    sample).  While some ``X`` inside one part of the residual graph has
    ``|X| <= a`` and ``|N(X) \\ (Y1 u Y2)| <= (1-4 alpha)/(2 alpha) |X|``, the
    first such ``X`` (increasing size, part 1 before part 2, lexicographic)
    is removed.  ``max_size`` caps the searched set size; the result records
    the cap.  Raises :class:`RemovalOverflow` if a part would lose more than
    ``a`` vertices, which refutes alpha-joinedness.
    """
    N = _equal_parts(g)
    alpha_q = as_fraction(alpha)
    if not 0 < alpha_q < Fraction(1, 5):
        raise ValueError("alpha must lie in (0, 1/5)")
    a = alpha_size(alpha_q, N)
    if 2 * a > N:
        raise ValueError(f"2*ceil(alpha N) = {2 * a} exceeds N = {N}")
    ratio = (1 - 4 * alpha_q) / (2 * alpha_q)
    Y1, Y2 = _choose_Y(N, a, y_seed)
    ymask = [mask_of(Y1), mask_of(Y2)]
    alive = [g.full_mask(1), g.full_mask(2)]
    removed = [0, 0]
    log = []
    for _ in range(2 * N + 1):
        hit = _find_violator(g, alive, ymask, ratio, a, max_size, budget)
        if hit is None:
            break
        part, X, size = hit
        xmask = mask_of(X)
        if (removed[part - 1] | xmask).bit_count() > a:
            witness = _overflow_witness(g, part, removed[part - 1] | xmask, a)
            raise RemovalOverflow(
                part,
                VertexSet.from_mask(1, removed[0]),
                VertexSet.from_mask(2, removed[1]),
                VertexSet(part, X),
                witness,
            )
        removed[part - 1] |= xmask
        alive[part - 1] &= ~xmask
        log.append(RemovalStep(part, VertexSet(part, X), size))
    return ExtractionResult(
        N=N,
        alpha=alpha,
        a=a,
        kept1=VertexSet.from_mask(1, alive[0]),
        kept2=VertexSet.from_mask(2, alive[1]),
        removed1=VertexSet.from_mask(1, removed[0]),
        removed2=VertexSet.from_mask(2, removed[1]),
        Y1=VertexSet(1, Y1),
        Y2=VertexSet(2, Y2),
        Y1prime=VertexSet.from_mask(1, ymask[0] & ~removed[0]),
        Y2prime=VertexSet.from_mask(2, ymask[1] & ~removed[1]),
        removal_log=log,
        search_cap=max_size,
        graph=g,
    )


# -- verification ----------------------------------------------------------

def _all_neighborhoods(rows: tuple[int, ...]) -> np.ndarray:
    m = len(rows)
    nb = np.zeros(1 << m, dtype=np.uint64)
    for b, r in enumerate(rows):
        half = 1 << b
        nb[half : 2 * half] = nb[:half] | np.uint64(r)
    return nb


def _least_mask(masks: np.ndarray, sizes: np.ndarray):
    smallest = sizes.min()
    pick = masks[sizes == smallest]
    return min(tuple(iter_bits(int(x))) for x in pick)


def verify_extraction(gprime: BipartiteGraph, alpha, N: int, *, budget: int | None = None) -> Verdict:
    """Check the three expansion bullets on ``G'`` by full subset enumeration.

    For each part and every nonempty ``X``: ``|X| <= a`` needs
    ``|N(X)| > (1-4 alpha)/(2 alpha) |X|``; ``|X| > a`` needs
    ``|N(X)| > (1-2 alpha) N``; ``|X| <= floor(6 alpha N)`` needs
    ``|N(X)| >= (1-2 alpha)/(6 alpha) |X|``.  The witness is
    ``(bullet, VertexSet)`` for the first failing bullet, part 1 first,
    smallest then lexicographically least set.
    """
    alpha_q = as_fraction(alpha)
    a = alpha_size(alpha_q, N)
    small = (1 - 4 * alpha_q) / (2 * alpha_q)
    big = (1 - 2 * alpha_q) * N
    exp_n = floor(6 * alpha_q * N)
    exp_D = (1 - 2 * alpha_q) / (6 * alpha_q)
    bud = Budget(budget)
    checked = 0
    failures = []
    for part in (1, 2):
        m = gprime.size(part)
        if gprime.size(3 - part) > 64:
            raise ValueError("full enumeration supports opposite parts of at most 64 vertices")
        bud.reserve(1 << m)
        nb = _all_neighborhoods(gprime.rows(part))
        masks = np.arange(1 << m, dtype=np.uint64)
        sizes = np.bitwise_count(masks).astype(np.int64)
        nsz = np.bitwise_count(nb).astype(np.int64)
        checked += 1 << m
        nonempty = sizes > 0
        rules = [
            ("small_sets", nonempty & (sizes <= a) & ~(nsz * small.denominator > small.numerator * sizes)),
            ("large_sets", (sizes > a) & ~(nsz * big.denominator > big.numerator)),
            ("expanding", nonempty & (sizes <= exp_n) & ~(nsz * exp_D.denominator >= exp_D.numerator * sizes)),
        ]
        for k, (name, bad) in enumerate(rules):
            if bad.any():
                failures.append((k, part, name, VertexSet(part, _least_mask(masks[bad], sizes[bad]))))
    if failures:
        _, _, name, X = min(failures, key=lambda t: (t[0], t[1]))
        return Verdict(False, (name, X), checked)
    return Verdict(True, None, checked)


def initial_null_embedding(result: ExtractionResult, r1: int, r2: int) -> Embedding:
    """Isolated pattern vertices on the lowest indices of ``Y'_1`` and ``Y'_2``.

    The embedding lives in ``G'`` coordinates (see :meth:`ExtractionResult.subgraph`).
    """
    if r1 > len(result.Y1prime) or r2 > len(result.Y2prime):
        raise InsufficientYSpace(
            f"need {r1}+{r2} slots, Y' sets hold {len(result.Y1prime)}+{len(result.Y2prime)}"
        )
    gp, map1, map2 = result.subgraph()
    pos1 = {old: new for new, old in enumerate(map1)}
    pos2 = {old: new for new, old in enumerate(map2)}
    return null_embedding(
        gp,
        [pos1[h] for h in result.Y1prime.members[:r1]],
        [pos2[h] for h in result.Y2prime.members[:r2]],
    )
