"""Bipartite graphs with bitset adjacency and exact subset queries.

Vertices are addressed as ``(part, index)`` pairs; there is no global
numbering.  Each vertex stores its cross-part neighbourhood as a Python int
used as a bit vector, so set unions and intersections during subset
enumeration are single big-int operations.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import (
    DuplicateEdge,
    EnumerationBudgetExceeded,
    InvalidVertex,
    ParseError,
    SamePart,
)

DEFAULT_BUDGET = 2**26


class PartId(enum.IntEnum):
    ONE = 1
    TWO = 2

    def other(self) -> "PartId":
        return PartId.TWO if self is PartId.ONE else PartId.ONE


def other(part: int) -> PartId:
    return PartId(part).other()


class VertexRef(NamedTuple):
    part: int
    index: int

    def __str__(self):
        return f"{self.part}:{self.index}"


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class VertexSet:
    part: int
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "part", PartId(self.part))
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    @classmethod
    def from_mask(cls, part: int, mask: int) -> "VertexSet":
        return cls(part, tuple(iter_bits(mask)))

    @classmethod
    def empty(cls, part: int) -> "VertexSet":
        return cls(part, ())

    @property
    def mask(self) -> int:
        return mask_of(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, index):
        return index in self.members

    def refs(self) -> list[VertexRef]:
        return [VertexRef(int(self.part), i) for i in self.members]

    def to_json(self) -> dict:
        return {"part": int(self.part), "members": list(self.members)}

    @classmethod
    def from_json(cls, data) -> "VertexSet":
        return cls(data["part"], tuple(data["members"]))


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome with an optional witness; truthy iff ``ok``."""

    ok: bool
    witness: object = None
    checked: int = 0
    mode: str = "exhaustive"
    detail: str = ""

    def __bool__(self):
        return self.ok


class BipartiteGraph:
    """Immutable bipartite graph; use :class:`GraphBuilder` for bulk construction."""

    def __init__(self, size1: int, size2: int, rows1=None, rows2=None):
        if size1 < 0 or size2 < 0:
            raise ValueError("part sizes must be nonnegative")
        self.size1 = size1
        self.size2 = size2
        rows1 = tuple(rows1) if rows1 is not None else (0,) * size1
        rows2 = tuple(rows2) if rows2 is not None else (0,) * size2
        if len(rows1) != size1 or len(rows2) != size2:
            raise ValueError("adjacency length does not match part sizes")
        self._rows = (rows1, rows2)

    # -- construction -------------------------------------------------
    @classmethod
    def from_edges(cls, size1: int, size2: int, edges: Iterable[tuple[int, int]]):
        b = GraphBuilder(size1, size2)
        for i, j in edges:
            b.add_edge(i, j)
        return b.build()

    @classmethod
    def complete(cls, size1: int, size2: int) -> "BipartiteGraph":
        full2 = (1 << size2) - 1
        full1 = (1 << size1) - 1
        return cls(size1, size2, (full2,) * size1, (full1,) * size2)

    def add_edge(self, u: VertexRef, v: VertexRef) -> "BipartiteGraph":
        """Return a new graph with the edge ``uv`` added."""
        u, v = VertexRef(*u), VertexRef(*v)
        if u.part == v.part:
            raise SamePart(f"{u} and {v} are in the same part")
        if u.part == 2:
            u, v = v, u
        self._check(u)
        self._check(v)
        if self._rows[0][u.index] >> v.index & 1:
            raise DuplicateEdge(f"edge {u}-{v} already present")
        r1 = list(self._rows[0])
        r2 = list(self._rows[1])
        r1[u.index] |= 1 << v.index
        r2[v.index] |= 1 << u.index
        return BipartiteGraph(self.size1, self.size2, r1, r2)

    # -- basic queries ----------------------------------------------
    def size(self, part: int) -> int:
        return self.size1 if part == 1 else self.size2

    def _check(self, ref: VertexRef):
        if ref.part not in (1, 2):
            raise InvalidVertex(f"bad part {ref.part}")
        if not 0 <= ref.index < self.size(ref.part):
            raise InvalidVertex(f"index {ref.index} out of range for part {ref.part}")

    def rows(self, part: int) -> tuple[int, ...]:
        """Neighbourhood bitmasks of all vertices in ``part``."""
        return self._rows[part - 1]

    def adj(self, part: int, index: int) -> int:
        return self._rows[part - 1][index]

    def has_edge(self, i: int, j: int) -> bool:
        """Edge between part-1 vertex ``i`` and part-2 vertex ``j``."""
        return bool(self._rows[0][i] >> j & 1)

    def degree(self, part: int, index: int) -> int:
        return self._rows[part - 1][index].bit_count()

    def degrees(self, part: int) -> list[int]:
        return [m.bit_count() for m in self._rows[part - 1]]

    def neighbors(self, ref: VertexRef) -> VertexSet:
        ref = VertexRef(*ref)
        self._check(ref)
        return VertexSet.from_mask(other(ref.part), self.adj(*ref))

    @cached_property
    def num_edges(self) -> int:
        return sum(m.bit_count() for m in self._rows[0])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges as ``(i, j)`` with ``i`` in part 1, in lexicographic order."""
        for i, m in enumerate(self._rows[0]):
            for j in iter_bits(m):
                yield i, j

    def full_mask(self, part: int) -> int:
        return (1 << self.size(part)) - 1

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense boolean biadjacency matrix (part 1 rows, part 2 columns)."""
        a = np.zeros((self.size1, self.size2), dtype=bool)
        for i, j in self.edges():
            a[i, j] = True
        a.setflags(write=False)
        return a

    def matrix_from(self, part: int) -> np.ndarray:
        return self.matrix if part == 1 else self.matrix.T

    def induced(self, keep1: Iterable[int], keep2: Iterable[int]):
        """Induced subgraph on the kept indices, re-indexed in increasing order.

        Returns ``(graph, map1, map2)`` where ``map_i[new] = old``.
        """
        map1 = sorted(set(keep1))
        map2 = sorted(set(keep2))
        pos2 = {old: new for new, old in enumerate(map2)}
        b = GraphBuilder(len(map1), len(map2))
        for new_i, old_i in enumerate(map1):
            for old_j in iter_bits(self._rows[0][old_i]):
                if old_j in pos2:
                    b.add_edge(new_i, pos2[old_j])
        return b.build(), map1, map2

    def spanning(self, edges: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        """Spanning subgraph with the given edge subset."""
        return BipartiteGraph.from_edges(self.size1, self.size2, edges)

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (self.size1, self.size2, self._rows) == (other.size1, other.size2, other._rows)

    def __hash__(self):
        return hash((self.size1, self.size2, self._rows))

    def __repr__(self):
        return f"BipartiteGraph({self.size1}, {self.size2}, e={self.num_edges})"


class GraphBuilder:
    def __init__(self, size1: int, size2: int):
        if size1 < 0 or size2 < 0:
            raise ValueError("part sizes must be nonnegative")
        self.size1 = size1
        self.size2 = size2
        self._r1 = [0] * size1
        self._r2 = [0] * size2

    def add_edge(self, i: int, j: int):
        if not 0 <= i < self.size1:
            raise InvalidVertex(f"part-1 index {i} out of range")
        if not 0 <= j < self.size2:
            raise InvalidVertex(f"part-2 index {j} out of range")
        if self._r1[i] >> j & 1:
            raise DuplicateEdge(f"edge 1:{i}-2:{j} already present")
        self._r1[i] |= 1 << j
        self._r2[j] |= 1 << i
        return self

    def build(self) -> BipartiteGraph:
        return BipartiteGraph(self.size1, self.size2, self._r1, self._r2)


def new_graph(size1: int, size2: int) -> BipartiteGraph:
    return BipartiteGraph(size1, size2)


def add_edge(g: BipartiteGraph, u: VertexRef, v: VertexRef) -> BipartiteGraph:
    return g.add_edge(u, v)


def neighborhood(g: BipartiteGraph, X: VertexSet) -> VertexSet:
    rows = g.rows(X.part)
    m = 0
    for i in X.members:
        if not 0 <= i < len(rows):
            raise InvalidVertex(f"index {i} out of range for part {int(X.part)}")
        m |= rows[i]
    return VertexSet.from_mask(X.part.other(), m)


def edge_count_between(g: BipartiteGraph, A: VertexSet, B: VertexSet) -> int:
    if A.part == B.part:
        raise SamePart("A and B must lie in opposite parts")
    if A.part == 2:
        A, B = B, A
    bmask = B.mask
    rows = g.rows(1)
    return sum((rows[i] & bmask).bit_count() for i in A.members)


def is_nD_bipartite(g: BipartiteGraph, n1: int, n2: int, D1, D2) -> Verdict:
    """Part sizes at most ``n_i`` and part-``i`` degrees at most ``D_i``."""
    for part, n in ((1, n1), (2, n2)):
        if g.size(part) > n:
            return Verdict(False, f"part {part} has {g.size(part)} > {n} vertices")
    for part, D in ((1, D1), (2, D2)):
        for i, m in enumerate(g.rows(part)):
            if m.bit_count() > D:
                return Verdict(False, VertexRef(part, i))
    return Verdict(True)


# -- subset enumeration ---------------------------------------------------

class Budget:
    """Counts enumerated subsets; raises before a size class would overflow."""

    def __init__(self, limit: int | None = DEFAULT_BUDGET):
        self.limit = DEFAULT_BUDGET if limit is None else limit
        self.used = 0

    def reserve(self, count: int, what="subsets"):
        if self.used + count > self.limit:
            raise EnumerationBudgetExceeded(self.used + count, self.limit, what)
        self.used += count


def lex_unions(items: list[int], masks: list[int], size: int):
    """Yield ``(combo, union)`` over ``size``-subsets of ``items`` in lex order.

    ``masks[k]`` is the bitset attached to ``items[k]``; ``union`` is the OR
    of the chosen masks.
    """
    m = len(items)
    if size == 0:
        yield (), 0
        return
    if size > m:
        return
    idx = list(range(size))
    acc = [0] * (size + 1)
    for t in range(size):
        acc[t + 1] = acc[t] | masks[idx[t]]
    while True:
        yield tuple(items[k] for k in idx), acc[size]
        t = size - 1
        while t >= 0 and idx[t] == m - size + t:
            t -= 1
        if t < 0:
            return
        idx[t] += 1
        for u in range(t + 1, size):
            idx[u] = idx[u - 1] + 1
        for u in range(t, size):
            acc[u + 1] = acc[u] | masks[idx[u]]


def as_fraction(x) -> Fraction:
    # floats such as (1-2a)/(6a) are snapped to the nearby small rational
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**9)
    return Fraction(x)


def is_expanding(
    g: BipartiteGraph,
    n: int,
    D,
    mode: str = "exhaustive",
    *,
    budget: int | None = None,
    trials: int = 10_000,
    seed: int = 0,
) -> Verdict:
    """Every nonempty ``X`` in either part with ``|X| <= n`` has ``|N(X)| >= D|X|``.

    Exhaustive mode scans sizes in increasing order (part 1 before part 2,
    lexicographic within a size) so the witness is the minimum-size,
    lexicographically least violating set.
    """
    D = as_fraction(D)
    if mode == "sampled":
        return _expanding_sampled(g, n, D, trials, seed)
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    bud = Budget(budget)
    min_deg = {p: min(g.degrees(p), default=0) for p in (1, 2)}
    checked = 0
    for s in range(1, n + 1):
        for part in (1, 2):
            m = g.size(part)
            if s > m:
                continue
            need = D * s
            if min_deg[part] >= need:
                continue
            bud.reserve(comb(m, s))
            rows = list(g.rows(part))
            for combo, u in lex_unions(list(range(m)), rows, s):
                checked += 1
                if u.bit_count() < need:
                    return Verdict(False, VertexSet(part, combo), checked)
    return Verdict(True, None, checked)


def _expanding_sampled(g, n, D, trials, seed) -> Verdict:
    rng = random.Random(seed)
    parts = [p for p in (1, 2) if g.size(p) > 0]
    if not parts:
        return Verdict(True, None, 0, "sampled")
    for t in range(trials):
        part = rng.choice(parts)
        m = g.size(part)
        s = rng.randint(1, min(n, m))
        combo = rng.sample(range(m), s)
        u = 0
        for i in combo:
            u |= g.adj(part, i)
        if u.bit_count() < D * s:
            return Verdict(False, VertexSet(part, combo), t + 1, "sampled")
    return Verdict(True, None, trials, "sampled")


# -- edge-list files --------------------------------------------------------

def format_edge_list(g: BipartiteGraph) -> str:
    lines = [f"p bip {g.size1} {g.size2} {g.num_edges}"]
    lines.extend(f"e {i} {j}" for i, j in g.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> BipartiteGraph:
    builder = None
    declared = None
    count = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tok = line.split()
        if tok[0] == "p":
            if builder is not None:
                raise ParseError(lineno, "duplicate header")
            if len(tok) != 5 or tok[1] != "bip":
                raise ParseError(lineno, f"expected 'p bip <size1> <size2> <edges>', got {line!r}")
            try:
                s1, s2, declared = int(tok[2]), int(tok[3]), int(tok[4])
            except ValueError:
                raise ParseError(lineno, f"non-integer header field in {line!r}") from None
            if min(s1, s2, declared) < 0:
                raise ParseError(lineno, "negative header field")
            builder = GraphBuilder(s1, s2)
        elif tok[0] == "e":
            if builder is None:
                raise ParseError(lineno, "edge before header")
            if len(tok) != 3:
                raise ParseError(lineno, f"expected 'e <i> <j>', got {line!r}")
            try:
                i, j = int(tok[1]), int(tok[2])
            except ValueError:
                raise ParseError(lineno, f"non-integer vertex in {line!r}") from None
            builder.add_edge(i, j)
            count += 1
        else:
            raise ParseError(lineno, f"unknown line type {tok[0]!r}")
    if builder is None:
        raise ParseError(0, "missing header")
    if count != declared:
        raise ParseError(0, f"header declares {declared} edges, found {count}")
    return builder.build()


def load_edge_list(path) -> BipartiteGraph:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def save_edge_list(g: BipartiteGraph, path):
    with open(path, "w") as fh:
        fh.write(format_edge_list(g))
