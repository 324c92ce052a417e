"""Good embeddings of bipartite patterns: deficiency, certification, leaf
extension, pruning, and the tree blueprints used by the subdivision embedder.

For a host set ``X`` inside one part the deficiency is

    R(X) = |N(X) \\ image| - sum_{x in X} (D - deg_F(preimage(x))) - |image & X|

with ``deg_F = 0`` for unused host vertices; an embedding is (n, D)-good when
``R(X) >= 0`` for every ``X`` of either part with ``1 <= |X| <= n``.  Writing
``cost(x) = D - deg_F(preimage(x)) + [x in image]`` gives
``R(X) = |N(X) \\ image| - sum cost(x)``, which is what the code evaluates.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, NamedTuple

import numpy as np

from .bigraph import (
    BipartiteGraph,
    Budget,
    Verdict,
    VertexRef,
    VertexSet,
    iter_bits,
    lex_unions,
)
from .errors import (
    DegreeTooHigh,
    DegreeTooSmall,
    GoodnessLost,
    NoCandidate,
    NoGoodCandidate,
    ParseError,
    PatternBoundViolation,
    SigmaTooShort,
)


class PatternGraph:
    """Bipartite pattern ``F``; every edit returns a new version.

    Vertex indices are never reused after removal, so a ``VertexRef`` keeps
    naming the same pattern vertex across versions.
    """

    def __init__(self, adj=None, next_index=(0, 0), bound=None):
        self._adj: dict[VertexRef, frozenset] = dict(adj or {})
        self._next = tuple(next_index)
        self.bound = bound
        if bound is not None:
            self._check_bound()

    @classmethod
    def null(cls, r1: int, r2: int, bound=None) -> "PatternGraph":
        adj = {VertexRef(1, i): frozenset() for i in range(r1)}
        adj.update({VertexRef(2, j): frozenset() for j in range(r2)})
        return cls(adj, (r1, r2), bound)

    @classmethod
    def from_bipartite(cls, g: BipartiteGraph, bound=None) -> "PatternGraph":
        adj = {}
        for part in (1, 2):
            for i, m in enumerate(g.rows(part)):
                adj[VertexRef(part, i)] = frozenset(VertexRef(3 - part, j) for j in iter_bits(m))
        return cls(adj, (g.size1, g.size2), bound)

    def _check_bound(self):
        n, D = self.bound
        for part in (1, 2):
            if self.count(part) > n:
                raise PatternBoundViolation(f"part {part} has {self.count(part)} > {n} vertices")
        for v, nb in self._adj.items():
            if len(nb) > D:
                raise PatternBoundViolation(f"{v} has degree {len(nb)} > {D}")

    def _derive(self, adj, next_index=None) -> "PatternGraph":
        return PatternGraph(adj, next_index or self._next, self.bound)

    def with_bound(self, n, D) -> "PatternGraph":
        return PatternGraph(self._adj, self._next, (n, D))

    # -- queries ------------------------------------------------------
    def __contains__(self, v):
        return v in self._adj

    def __len__(self):
        return len(self._adj)

    def vertices(self) -> list[VertexRef]:
        return sorted(self._adj)

    def degree(self, v) -> int:
        return len(self._adj[v])

    def neighbors(self, v) -> frozenset:
        return self._adj[v]

    def count(self, part: int) -> int:
        return sum(1 for v in self._adj if v.part == part)

    def max_degree(self) -> int:
        return max((len(nb) for nb in self._adj.values()), default=0)

    def edges(self) -> list[tuple[VertexRef, VertexRef]]:
        return sorted((u, v) for u, nb in self._adj.items() if u.part == 1 for v in nb)

    # -- edits --------------------------------------------------------
    def add_vertex(self, part: int):
        v = VertexRef(part, self._next[part - 1])
        nxt = list(self._next)
        nxt[part - 1] += 1
        adj = dict(self._adj)
        adj[v] = frozenset()
        return self._derive(adj, tuple(nxt)), v

    def add_leaf(self, w):
        w = VertexRef(*w)
        if w not in self._adj:
            raise KeyError(w)
        g, v = self.add_vertex(3 - w.part)
        adj = g._adj
        adj[v] = frozenset((w,))
        adj[w] = adj[w] | {v}
        if self.bound is not None:
            g._check_bound()
        return g, v

    def add_edge(self, u, v) -> "PatternGraph":
        u, v = VertexRef(*u), VertexRef(*v)
        if u.part == v.part:
            raise ValueError(f"{u} and {v} are in the same part")
        if v in self._adj[u]:
            raise ValueError(f"edge {u}-{v} already present")
        adj = dict(self._adj)
        adj[u] = adj[u] | {v}
        adj[v] = adj[v] | {u}
        return self._derive(adj)

    def remove_vertex(self, v) -> "PatternGraph":
        v = VertexRef(*v)
        adj = dict(self._adj)
        for u in adj.pop(v):
            adj[u] = adj[u] - {v}
        return self._derive(adj)


class Embedding:
    """Injective, part-respecting, edge-preserving map of a pattern into a host.

    Pattern part ``i`` maps into host part ``i``.
    """

    def __init__(self, pattern: PatternGraph, host: BipartiteGraph, forward: dict, validate=True):
        self.pattern = pattern
        self.host = host
        self.forward = {VertexRef(*k): VertexRef(*v) for k, v in forward.items()}
        self.inverse = {h: p for p, h in self.forward.items()}
        img = [0, 0]
        for h in self.forward.values():
            img[h.part - 1] |= 1 << h.index
        self._img = img
        if validate:
            self.validate()

    @classmethod
    def _unchecked(cls, pattern, host, forward, inverse, img):
        e = cls.__new__(cls)
        e.pattern, e.host, e.forward, e.inverse, e._img = pattern, host, forward, inverse, img
        return e

    def validate(self):
        if set(self.forward) != set(self.pattern.vertices()):
            raise ValueError("forward map must cover exactly the pattern vertices")
        if len(self.inverse) != len(self.forward):
            raise ValueError("map is not injective")
        for p, h in self.forward.items():
            if p.part != h.part:
                raise ValueError(f"{p} mapped across parts to {h}")
            if not 0 <= h.index < self.host.size(h.part):
                raise ValueError(f"{h} is not a host vertex")
        for u, v in self.pattern.edges():
            if not self.host.has_edge(self.forward[u].index, self.forward[v].index):
                raise ValueError(f"pattern edge {u}-{v} is not mapped to a host edge")

    def image_mask(self, part: int) -> int:
        return self._img[part - 1]

    def image_set(self, part: int) -> VertexSet:
        return VertexSet.from_mask(part, self._img[part - 1])

    def __len__(self):
        return len(self.forward)

    def pattern_degree_at(self, h: VertexRef) -> int:
        p = self.inverse.get(h)
        return 0 if p is None else self.pattern.degree(p)

    def costs(self, part: int, D) -> list:
        """``D - deg_F + [mapped]`` for every host vertex of ``part``."""
        out = [D] * self.host.size(part)
        for h, p in self.inverse.items():
            if h.part == part:
                out[h.index] = D - self.pattern.degree(p) + 1
        return out

    # -- derived versions -----------------------------------------
    def with_leaf(self, w, a: VertexRef):
        """Attach a new pattern leaf to ``w`` and map it to host vertex ``a``."""
        w, a = VertexRef(*w), VertexRef(*a)
        hw = self.forward[w]
        if a.part == hw.part or not self.host.adj(hw.part, hw.index) >> a.index & 1:
            raise ValueError(f"{a} is not a host neighbour of {hw}")
        if a in self.inverse:
            raise ValueError(f"{a} is already used")
        pattern, leaf = self.pattern.add_leaf(w)
        fwd = dict(self.forward)
        fwd[leaf] = a
        inv = dict(self.inverse)
        inv[a] = leaf
        img = list(self._img)
        img[a.part - 1] |= 1 << a.index
        return Embedding._unchecked(pattern, self.host, fwd, inv, img), leaf

    def with_edge(self, u, v) -> "Embedding":
        """Add a pattern edge between two embedded vertices joined in the host."""
        u, v = VertexRef(*u), VertexRef(*v)
        hu, hv = self.forward[u], self.forward[v]
        if hu.part == hv.part or not self.host.adj(hu.part, hu.index) >> hv.index & 1:
            raise ValueError(f"{hu} and {hv} are not adjacent in the host")
        return Embedding._unchecked(
            self.pattern.add_edge(u, v), self.host, self.forward, self.inverse, self._img
        )

    def without(self, v) -> "Embedding":
        v = VertexRef(*v)
        h = self.forward[v]
        fwd = dict(self.forward)
        del fwd[v]
        inv = dict(self.inverse)
        del inv[h]
        img = list(self._img)
        img[h.part - 1] &= ~(1 << h.index)
        return Embedding._unchecked(self.pattern.remove_vertex(v), self.host, fwd, inv, img)


def null_embedding(host: BipartiteGraph, images1: Iterable[int], images2: Iterable[int]) -> Embedding:
    """Embed isolated pattern vertices ``(i, k)`` onto the listed host indices."""
    images1, images2 = list(images1), list(images2)
    pattern = PatternGraph.null(len(images1), len(images2))
    fwd = {VertexRef(1, k): VertexRef(1, h) for k, h in enumerate(images1)}
    fwd.update({VertexRef(2, k): VertexRef(2, h) for k, h in enumerate(images2)})
    return Embedding(pattern, host, fwd)


# -- deficiency and goodness ---------------------------------------------

@dataclass(frozen=True)
class DeficiencyWitness:
    X: VertexSet
    R_value: object
    n_bound: int
    D_bound: object

    def to_json(self):
        return {
            "X": self.X.to_json(),
            "R": float(self.R_value) if not isinstance(self.R_value, int) else self.R_value,
            "n": self.n_bound,
            "D": float(self.D_bound) if not isinstance(self.D_bound, int) else self.D_bound,
        }


def deficiency(emb: Embedding, X: VertexSet, D):
    part = int(X.part)
    rows = emb.host.rows(part)
    nb = 0
    for x in X.members:
        nb |= rows[x]
    fresh = (nb & ~emb.image_mask(3 - part)).bit_count()
    budget = 0
    occupied = 0
    for x in X.members:
        p = emb.inverse.get(VertexRef(part, x))
        if p is None:
            budget += D
        else:
            budget += D - emb.pattern.degree(p)
            occupied += 1
    return fresh - budget - occupied


def _fresh_rows(emb: Embedding, part: int) -> list[int]:
    img = emb.image_mask(3 - part)
    return [r & ~img for r in emb.host.rows(part)]


def _prefix_top(costs: list) -> list:
    top = sorted(costs, reverse=True)
    out = [0]
    for c in top:
        out.append(out[-1] + c)
    return out


def verify_good(
    emb: Embedding,
    n: int,
    D,
    mode: str = "exhaustive",
    *,
    max_size: int | None = None,
    budget: int | None = None,
) -> Verdict:
    """Check ``R(X) >= 0`` for all single-part ``X`` with ``1 <= |X| <= n``.

    ``mode="capped"`` stops at ``|X| <= max_size`` and says so in ``detail``.
    Sizes are scanned in increasing order (part 1 first, then part 2,
    lexicographic inside), so a returned witness is the least one.  A size
    class is skipped without enumeration when the smallest fresh degree in
    the part already covers the largest possible cost of ``s`` vertices.
    """
    if mode == "capped":
        if max_size is None:
            raise ValueError("capped mode needs max_size")
        limit = min(n, max_size)
    elif mode == "exhaustive":
        limit = n
    else:
        raise ValueError(f"unknown mode {mode!r}")
    bud = Budget(budget)
    detail = "complete" if limit == n else f"partial: |X| <= {limit} of {n}"
    data = {}
    for part in (1, 2):
        fresh = _fresh_rows(emb, part)
        costs = emb.costs(part, D)
        min_f = min((f.bit_count() for f in fresh), default=0)
        data[part] = (fresh, costs, min_f, _prefix_top(costs))
    checked = 0
    for s in range(1, limit + 1):
        for part in (1, 2):
            fresh, costs, min_f, top = data[part]
            m = len(fresh)
            if s > m or min_f - top[s] >= 0:
                continue
            bud.reserve(comb(m, s))
            for combo, u in lex_unions(list(range(m)), fresh, s):
                checked += 1
                r = u.bit_count() - sum(costs[k] for k in combo)
                if r < 0:
                    w = DeficiencyWitness(VertexSet(part, combo), r, n, D)
                    return Verdict(False, w, checked, mode, detail)
    return Verdict(True, None, checked, mode, detail)


def _local_violation(emb: Embedding, a: VertexRef, D, s_max: int, budget=None):
    """Least ``X`` with ``|X| <= s_max`` touching ``N(a)`` and ``R(X) < 0``.

    Only such sets can lose deficiency when a new leaf lands on ``a``, so a
    capped-good embedding stays capped-good if this returns ``None``.
    """
    q = a.part
    p = 3 - q
    host = emb.host
    fresh = _fresh_rows(emb, p)
    f = [x.bit_count() for x in fresh]
    costs = emb.costs(p, D)
    top = _prefix_top(costs)
    nmask = host.adj(q, a.index)
    nbrs = list(iter_bits(nmask))
    m = len(fresh)
    min_f = min(f, default=0)
    bud = Budget(budget)
    for s in range(1, min(s_max, m) + 1):
        if min_f - top[s] >= 0:
            continue
        if s == 1:
            for x in nbrs:
                if f[x] - costs[x] < 0:
                    return DeficiencyWitness(VertexSet(p, (x,)), f[x] - costs[x], s_max, D)
        elif s == 2 and isinstance(D, int):
            w = _pair_violation(emb, p, nbrs, f, costs, D, s_max)
            if w is not None:
                return w
        else:
            bud.reserve(comb(m, s))
            for combo, u in lex_unions(list(range(m)), fresh, s):
                if not any(nmask >> k & 1 for k in combo):
                    continue
                r = u.bit_count() - sum(costs[k] for k in combo)
                if r < 0:
                    return DeficiencyWitness(VertexSet(p, combo), r, s_max, D)
    return None


def _pair_violation(emb, p, nbrs, f, costs, D, s_max):
    if not nbrs:
        return None
    q = 3 - p
    img_q = np.zeros(emb.host.size(q), dtype=bool)
    for k in iter_bits(emb.image_mask(q)):
        img_q[k] = True
    M = emb.host.matrix_from(p)[:, ~img_q].astype(np.float32)
    inter = M[nbrs] @ M.T
    fa = np.asarray(f, dtype=np.float64)
    ca = np.asarray(costs, dtype=np.float64)
    xs = np.asarray(nbrs, dtype=np.intp)
    R = fa[xs, None] + fa[None, :] - inter - ca[xs, None] - ca[None, :]
    R[np.arange(len(xs)), xs] = np.inf
    bad = np.argwhere(R < 0)
    if len(bad) == 0:
        return None
    pairs = sorted({tuple(sorted((int(xs[i]), int(y)))) for i, y in bad})
    X = VertexSet(p, pairs[0])
    return DeficiencyWitness(X, deficiency(emb, X, D), s_max, D)


# -- extension and pruning -------------------------------------------------

class LeafExtension(NamedTuple):
    embedding: Embedding
    leaf: VertexRef
    retries: int
    image: VertexRef


def extend_leaf(
    emb: Embedding,
    w,
    n: int,
    D: int,
    mode: str = "certified",
    *,
    s_max: int = 2,
    budget: int | None = None,
) -> LeafExtension:
    """Attach a new leaf to pattern vertex ``w`` keeping the embedding good.

    Candidates are the unused host neighbours of ``w``'s image, tried by
    decreasing number of unused neighbours, then increasing index.
    Certified mode accepts the first candidate whose extension is
    (2n, D)-good by exhaustive check; greedy mode accepts the first one that
    creates no negative deficiency on sets of size ``<= s_max`` around it.
    """
    w = VertexRef(*w)
    pattern = emb.pattern
    if pattern.degree(w) > D - 1:
        raise DegreeTooHigh(f"{w} already has degree {pattern.degree(w)} >= D = {D}")
    leaf_part = 3 - w.part
    if pattern.count(leaf_part) + 1 > n:
        raise PatternBoundViolation(f"part {leaf_part} of the pattern would exceed {n} vertices")
    if mode not in ("certified", "greedy"):
        raise ValueError(f"unknown mode {mode!r}")
    hw = emb.forward[w]
    q = 3 - hw.part
    host = emb.host
    Y = host.adj(hw.part, hw.index) & ~emb.image_mask(q)
    if not Y:
        raise NoCandidate(f"image of {w} has no unused neighbour")
    img_p = emb.image_mask(hw.part)
    rows_q = host.rows(q)
    cands = sorted(iter_bits(Y), key=lambda j: (-(rows_q[j] & ~img_p).bit_count(), j))
    for tried, j in enumerate(cands):
        a = VertexRef(q, j)
        new, leaf = emb.with_leaf(w, a)
        if mode == "certified":
            ok = verify_good(new, 2 * n, D, budget=budget).ok
        else:
            ok = _local_violation(new, a, D, s_max, budget) is None
        if ok:
            return LeafExtension(new, leaf, tried, a)
    raise NoGoodCandidate(f"none of {len(cands)} candidates keeps the embedding good", len(cands))


def prune(emb: Embedding, order, *, verify=None, budget=None) -> Embedding:
    """Delete pattern vertices in ``order``; each must have degree <= 1 when reached.

    ``verify=(n, D)`` re-checks goodness after every deletion.
    """
    for v in order:
        v = VertexRef(*v)
        d = emb.pattern.degree(v)
        if d > 1:
            raise DegreeTooHigh(f"{v} has degree {d} when pruned")
        emb = emb.without(v)
        if verify is not None:
            res = verify_good(emb, verify[0], verify[1], budget=budget)
            if not res:
                raise GoodnessLost(res.witness)
    return emb


# -- tree blueprints -------------------------------------------------------

ROLES = ("odd", "even_j1", "even_j2")


def branch_height(D: int, leaf_target: int) -> int:
    """Smallest ``k`` with ``(D-1)**k >= leaf_target``."""
    k, cap = 0, 1
    while cap < leaf_target:
        k += 1
        cap *= D - 1
    return k


def role_path_length(sigma: int, role: str, k: int) -> int:
    if role == "odd":
        return (sigma - 2 * k - 1) // 2
    if role == "even_j1":
        return sigma // 2 - k - 1
    if role == "even_j2":
        return sigma // 2 - k
    raise ValueError(f"unknown role {role!r}")


@dataclass(frozen=True)
class TreeBlueprint:
    sigma: int
    role: str
    degree: int
    path_length: int
    branch_height: int
    leaf_target: int
    parent: tuple
    root: int = 0

    @property
    def height(self) -> int:
        return self.path_length + self.branch_height

    def depths(self) -> list[int]:
        d = [0] * len(self.parent)
        for t in range(1, len(self.parent)):
            d[t] = d[self.parent[t]] + 1
        return d

    def leaves(self) -> list[int]:
        if len(self.parent) == 1:
            return [0]
        has_child = set(self.parent[1:])
        return [t for t in range(len(self.parent)) if t not in has_child]

    def path_to_root(self, t: int) -> list[int]:
        out = [t]
        while t != self.root:
            t = self.parent[t]
            out.append(t)
        return out

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "sigma": self.sigma,
            "role": self.role,
            "degree": self.degree,
            "path_length": self.path_length,
            "branch_height": self.branch_height,
            "leaf_target": self.leaf_target,
            "parent": [-1] + list(self.parent[1:]),
        }


def build_tree_blueprint(sigma: int, parity_role: str, D: int, leaf_target: int) -> TreeBlueprint:
    """A path from the root followed by a leftmost-filled (D-1)-ary tree.

    All ``leaf_target`` leaves sit at depth ``path_length + k``.  Path
    lengths: odd ``(sigma-2k-1)/2``, even_j1 ``sigma/2-k-1``, even_j2
    ``sigma/2-k``.
    """
    if D <= 2:
        raise DegreeTooSmall(f"D = {D}; tree growth needs D >= 3")
    if leaf_target < 1:
        raise ValueError("leaf_target must be positive")
    k = branch_height(D, leaf_target)
    if parity_role == "odd":
        if sigma % 2 == 0:
            raise ValueError("odd role needs odd sigma")
        if sigma < 2 * k + 1:
            raise SigmaTooShort(f"sigma = {sigma} < 2k+1 = {2 * k + 1}")
    elif parity_role in ("even_j1", "even_j2"):
        if sigma % 2:
            raise ValueError("even roles need even sigma")
        if sigma // 2 - k - 1 < 0:
            raise SigmaTooShort(f"sigma = {sigma} < 2k+2 = {2 * k + 2}")
    else:
        raise ValueError(f"unknown role {parity_role!r}")
    L = role_path_length(sigma, parity_role, k)
    parent = [-1] + list(range(L))
    level = [L]
    for d in range(1, k + 1):
        span = (D - 1) ** (k - d)
        count = -(-leaf_target // span)
        nxt = []
        for t in range(count):
            parent.append(level[t // (D - 1)])
            nxt.append(len(parent) - 1)
        level = nxt
    return TreeBlueprint(sigma, parity_role, D, L, k, leaf_target, tuple(parent))


# -- serialization ---------------------------------------------------------

def format_embedding_tsv(forward: dict) -> str:
    lines = [
        f"{p.part}\t{p.index}\t{h.part}\t{h.index}"
        for p, h in sorted((VertexRef(*p), VertexRef(*h)) for p, h in forward.items())
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_embedding_tsv(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.startswith("#"):
            continue
        tok = raw.split()
        if len(tok) != 4:
            raise ParseError(lineno, "expected 4 fields")
        try:
            pp, pi, hp, hi = map(int, tok)
        except ValueError:
            raise ParseError(lineno, "non-integer field") from None
        out[VertexRef(pp, pi)] = VertexRef(hp, hi)
    return out
