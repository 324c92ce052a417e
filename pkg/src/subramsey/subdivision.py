"""Subdivisions ``H^sigma`` and their embedding into alpha-joined hosts.

Vertices of ``H^sigma`` are labelled ``("v", h)`` for a vertex ``h`` of
``H`` and ``("e", i, j)`` for the ``j``-th internal vertex of edge ``i``,
counted from the edge's first endpoint.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain

from .bigraph import BipartiteGraph, VertexRef, VertexSet, as_fraction, iter_bits
from .errors import HypothesisViolation, NoCrossingEdge
from .goodembed import (
    Embedding,
    PatternGraph,
    branch_height,
    build_tree_blueprint,
    extend_leaf,
    prune,
    verify_good,
)
from .joinedness import alpha_size, extract_expander, initial_null_embedding


@dataclass(frozen=True)
class BaseGraph:
    num_vertices: int
    edges: tuple

    def __post_init__(self):
        norm = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{self.num_vertices - 1}")
            key = frozenset((u, v))
            if key in seen:
                raise ValueError(f"repeated edge ({u}, {v})")
            seen.add(key)
            norm.append((u, v))
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def from_edges(cls, edges, num_vertices=None):
        edges = [tuple(e) for e in edges]
        if num_vertices is None:
            num_vertices = 1 + max(chain.from_iterable(edges), default=-1)
        return cls(num_vertices, tuple(edges))

    def degree(self, v) -> int:
        return sum(v in e for e in self.edges)

    @property
    def max_degree(self) -> int:
        return max((self.degree(v) for v in range(self.num_vertices)), default=0)


def parse_base_graph(text: str) -> BaseGraph:
    """Whitespace separated ``u v`` lines; ``#`` comments; optional ``n <count>`` line."""
    edges, n = [], None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip().replace(",", " ")
        if not line:
            continue
        tok = line.split()
        if tok[0] == "n" and len(tok) == 2:
            n = int(tok[1])
        elif len(tok) == 2:
            edges.append((int(tok[0]), int(tok[1])))
        else:
            raise ValueError(f"line {lineno}: expected 'u v'")
    return BaseGraph.from_edges(edges, n)


@dataclass(frozen=True)
class SubdivisionSpec:
    base: BaseGraph
    sigma: tuple

    def __post_init__(self):
        sigma = tuple(int(s) for s in self.sigma)
        if len(sigma) != len(self.base.edges):
            raise ValueError("need one sigma value per edge")
        if any(s < 1 for s in sigma):
            raise ValueError("sigma values must be positive")
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def uniform(cls, base: BaseGraph, sigma: int) -> "SubdivisionSpec":
        return cls(base, (sigma,) * len(base.edges))

    @property
    def num_vertices(self) -> int:
        return self.base.num_vertices + sum(s - 1 for s in self.sigma)


def parse_sigma(text: str, base: BaseGraph) -> tuple:
    """CSV rows ``edge_index,length``; a single bare integer applies to every edge."""
    rows = [r.split("#", 1)[0].strip() for r in text.splitlines()]
    rows = [r for r in rows if r]
    if len(rows) == 1 and "," not in rows[0]:
        return (int(rows[0]),) * len(base.edges)
    sigma = [None] * len(base.edges)
    for r in rows:
        i, s = (int(x) for x in r.split(","))
        sigma[i] = s
    if None in sigma:
        raise ValueError(f"missing sigma for edge {sigma.index(None)}")
    return tuple(sigma)


@dataclass(frozen=True)
class NonBipartite:
    """Marker for an ``H^sigma`` with an odd cycle; ``edge`` joins two same-class vertices."""

    edge: tuple

    def __bool__(self):
        return False


@dataclass
class SubdividedGraph:
    spec: SubdivisionSpec
    vertices: list
    edges: list
    paths: dict
    bipartition: object
    r1: int = 0
    r2: int = 0

    @property
    def is_bipartite(self) -> bool:
        return not isinstance(self.bipartition, NonBipartite)

    def part_of(self, label) -> int:
        return 1 if label in self.bipartition[0] else 2

    def part_sizes(self) -> tuple[int, int]:
        return len(self.bipartition[0]), len(self.bipartition[1])

    def to_bipartite(self):
        """``(graph, index)`` where ``index[label] = VertexRef`` in the bipartite graph."""
        A1 = sorted(self.bipartition[0])
        A2 = sorted(self.bipartition[1])
        index = {lab: VertexRef(1, i) for i, lab in enumerate(A1)}
        index.update({lab: VertexRef(2, i) for i, lab in enumerate(A2)})
        pairs = []
        for u, v in self.edges:
            a, b = index[u], index[v]
            if a.part == 2:
                a, b = b, a
            pairs.append((a.index, b.index))
        return BipartiteGraph.from_edges(len(A1), len(A2), pairs), index


def build_subdivision(spec: SubdivisionSpec) -> SubdividedGraph:
    base = spec.base
    vertices = [("v", h) for h in range(base.num_vertices)]
    edges, paths = [], {}
    for i, ((u, v), s) in enumerate(zip(base.edges, spec.sigma)):
        path = [("v", u)] + [("e", i, j) for j in range(1, s)] + [("v", v)]
        vertices.extend(path[1:-1])
        edges.extend(zip(path, path[1:]))
        paths[i] = path
    adj = {x: [] for x in vertices}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    colour = {}
    conflict = None
    for start in vertices:
        if start in colour:
            continue
        colour[start] = 1
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in colour:
                    colour[y] = 3 - colour[x]
                    queue.append(y)
                elif colour[y] == colour[x] and conflict is None:
                    conflict = (x, y)
    if conflict is not None:
        return SubdividedGraph(spec, vertices, edges, paths, NonBipartite(conflict))
    A1 = frozenset(x for x in vertices if colour[x] == 1)
    A2 = frozenset(x for x in vertices if colour[x] == 2)
    r1 = sum(1 for h in range(base.num_vertices) if ("v", h) in A1)
    return SubdividedGraph(spec, vertices, edges, paths, (A1, A2), r1, base.num_vertices - r1)


# -- hypotheses ------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    name: str
    message: str
    values: dict = field(default_factory=dict)

    def __str__(self):
        return self.message


@dataclass
class HypothesisReport:
    violations: list
    values: dict
    literal_only: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "violations": [{"name": v.name, "message": v.message, **v.values} for v in self.violations],
            "values": self.values,
            "literal_pass_strict_fail": self.literal_only,
        }


def promoted_degree(spec: SubdivisionSpec) -> int:
    return max(3, spec.base.max_degree)


def check_hypotheses(spec: SubdivisionSpec, alpha, N: int, D: int | None = None) -> HypothesisReport:
    """Collect every failed embedding hypothesis, with measured values.

    ``n`` is ``|V(H^sigma)|``.  Besides the literal length condition
    ``sigma(e) >= 2 log_{D-1}(alpha N)`` (checked exactly as
    ``(D-1)**sigma >= (alpha N)**2``) the stricter bounds ``sigma >= 2k+1``
    (odd) and ``sigma >= 2k+2`` (even) with ``k = ceil(log_{D-1} ceil(alpha N))``
    are enforced; edges passing only the literal one are listed in
    ``literal_only``.
    """
    if D is None:
        D = promoted_degree(spec)
    alpha_q = as_fraction(alpha)
    sd = build_subdivision(spec)
    n = spec.num_vertices
    a = alpha_size(alpha_q, N)
    violations, literal_only = [], []
    values = {"n": n, "N": N, "D": D, "alpha": float(alpha_q), "a": a, "max_degree": spec.base.max_degree}
    if not sd.is_bipartite:
        violations.append(Violation("bipartite", "NonBipartite: H^sigma has an odd cycle",
                                    {"edge": [list(x) for x in sd.bipartition.edge]}))
    if spec.base.max_degree > D:
        violations.append(Violation("max_degree", f"max degree {spec.base.max_degree} > D = {D}"))
    bound = Fraction(1, 6 * D + 14)
    if alpha_q > bound:
        violations.append(Violation("alpha", f"alpha <= 1/(6D+14) fails ({float(alpha_q):.6g} > 1/{6 * D + 14})"))
    need = n / alpha_q
    values["n_over_alpha"] = float(need)
    if N < need:
        violations.append(Violation(
            "N_bound", f"N >= n/alpha fails ({N} < {need if need.denominator > 1 else need.numerator})",
            {"N": N, "n_over_alpha": float(need)}))
    if D < 3:
        violations.append(Violation("degree", f"D = {D}; tree growth needs D >= 3"))
        return HypothesisReport(violations, values, literal_only)
    k = branch_height(D, a)
    values["k"] = k
    aN = alpha_q * N
    for i, s in enumerate(spec.sigma):
        literal = (D - 1) ** s * aN.denominator ** 2 >= aN.numerator ** 2
        strict_need = 2 * k + 1 if s % 2 else 2 * k + 2
        strict = s >= strict_need
        if not literal:
            violations.append(Violation(
                "sigma_literal", f"edge {i}: sigma = {s} < 2 log_{D - 1}(alpha N)",
                {"edge": i, "sigma": s}))
        if not strict:
            kind = "odd" if s % 2 else "even"
            violations.append(Violation(
                f"sigma_{kind}", f"edge {i}: sigma = {s} < {strict_need} needed for {kind} length with k = {k}",
                {"edge": i, "sigma": s, "needed": strict_need}))
            if literal:
                literal_only.append(i)
    return HypothesisReport(violations, values, literal_only)


# -- embedding pipeline ----------------------------------------------------

@dataclass
class EdgeReport:
    edge: int
    sigma: int
    roles: tuple
    path_lengths: tuple
    branch_height: int
    tree_sizes: tuple
    retries: int
    pruned: int
    crossing: tuple

    def to_json(self):
        return {
            "edge": self.edge,
            "sigma": self.sigma,
            "roles": list(self.roles),
            "path_lengths": list(self.path_lengths),
            "branch_height": self.branch_height,
            "tree_sizes": list(self.tree_sizes),
            "retries": self.retries,
            "pruned": self.pruned,
            "crossing": [list(x) for x in self.crossing],
        }


@dataclass
class Audit:
    injective: bool
    image_size: int
    expected_size: int
    path_lengths: dict
    bad_edges: list

    @property
    def passed(self) -> bool:
        return (
            self.injective
            and self.image_size == self.expected_size
            and not self.bad_edges
            and all(ok for _, ok in self.path_lengths.values())
        )

    def to_json(self):
        return {
            "pass": self.passed,
            "injective": self.injective,
            "image_size": self.image_size,
            "expected_size": self.expected_size,
            "path_lengths": {str(i): n for i, (n, _) in sorted(self.path_lengths.items())},
            "bad_edges": [[list(a), list(b)] for a, b in self.bad_edges],
        }


@dataclass
class SubdivisionEmbedding:
    subdivided: SubdividedGraph
    image: dict
    embedding: Embedding
    extraction: object
    edge_reports: list
    audit: Audit
    mode: str
    D: int

    def host_embedding(self, host: BipartiteGraph) -> Embedding:
        """``H^sigma`` as a pattern embedded into the original host."""
        g, index = self.subdivided.to_bipartite()
        pattern = PatternGraph.from_bipartite(g)
        return Embedding(pattern, host, {index[lab]: h for lab, h in self.image.items()})

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "D": self.D,
            "n": len(self.image),
            "image": [[_label_str(lab), h.part, h.index] for lab, h in sorted(self.image.items(), key=_label_key)],
            "edges": [r.to_json() for r in self.edge_reports],
            "extraction": {
                "removed1": len(self.extraction.removed1),
                "removed2": len(self.extraction.removed2),
                "search_cap": self.extraction.search_cap,
            },
            "audit": self.audit.to_json(),
        }


def _label_key(item):
    lab = item[0]
    return (0, lab[1], 0) if lab[0] == "v" else (1, lab[1], lab[2])


def _label_str(lab) -> str:
    return f"v{lab[1]}" if lab[0] == "v" else f"e{lab[1]}.{lab[2]}"


def audit_image(sd: SubdividedGraph, image: dict, host: BipartiteGraph) -> Audit:
    """Re-measure a labelled image directly in the host."""
    imgs = list(image.values())
    injective = len(set(imgs)) == len(imgs)
    bad = []
    lengths = {}
    for i, path in sd.paths.items():
        steps = 0
        for x, y in zip(path, path[1:]):
            hx, hy = image.get(x), image.get(y)
            if hx is None or hy is None or hx.part == hy.part:
                bad.append((x, y))
                continue
            i1, i2 = (hx.index, hy.index) if hx.part == 1 else (hy.index, hx.index)
            if host.has_edge(i1, i2):
                steps += 1
            else:
                bad.append((x, y))
        lengths[i] = (steps, steps == sd.spec.sigma[i])
    return Audit(injective, len(set(imgs)), sd.spec.num_vertices, lengths, bad)


def _check_state(emb: Embedding, bound_n: int, D: int):
    pat = emb.pattern
    if pat.count(1) > bound_n or pat.count(2) > bound_n or pat.max_degree() > D:
        raise AssertionError(
            f"intermediate pattern is not ({bound_n}, {D})-bipartite: "
            f"parts {pat.count(1)}/{pat.count(2)}, max degree {pat.max_degree()}"
        )


def embed_subdivision(
    host: BipartiteGraph,
    spec: SubdivisionSpec,
    alpha,
    edge_order=None,
    mode: str = "greedy",
    *,
    s_max: int = 2,
    mirror: bool = False,
    y_seed="first",
    budget: int | None = None,
) -> SubdivisionEmbedding:
    """Embed ``H^sigma`` edge by edge through two grown trees and a crossing edge.

    The host is assumed alpha-joined; a missing crossing edge raises
    :class:`NoCrossingEdge` carrying both leaf sets (host coordinates).
    ``mode="greedy"`` caps extraction and extension checks at sets of size
    ``s_max``; ``mode="certified"`` checks goodness exhaustively.
    """
    if mode not in ("certified", "greedy"):
        raise ValueError(f"unknown mode {mode!r}")
    D = promoted_degree(spec)
    N = host.size1
    hyp = check_hypotheses(spec, alpha, N, D)
    if host.size1 != host.size2:
        hyp.violations.append(Violation("host", "host parts must have equal size"))
    if not hyp:
        raise HypothesisViolation([str(v) for v in hyp.violations])
    sd = build_subdivision(spec)
    a = alpha_size(alpha, N)
    bound_n = 3 * a
    cap = s_max if mode == "greedy" else None
    extraction = extract_expander(host, alpha, y_seed, max_size=cap, budget=budget)
    gp, map1, map2 = extraction.subgraph()
    maps = {1: map1, 2: map2}

    base = spec.base
    cls1 = [h for h in range(base.num_vertices) if sd.part_of(("v", h)) == 1]
    cls2 = [h for h in range(base.num_vertices) if sd.part_of(("v", h)) == 2]
    if mirror:
        cls1, cls2 = cls2, cls1
    emb = initial_null_embedding(extraction, len(cls1), len(cls2))
    where = {("v", h): VertexRef(1, k) for k, h in enumerate(cls1)}
    where.update({("v", h): VertexRef(2, k) for k, h in enumerate(cls2)})

    order = list(range(len(base.edges))) if edge_order is None else list(edge_order)
    if sorted(order) != list(range(len(base.edges))):
        raise ValueError("edge_order must be a permutation of the edge indices")
    reports = []
    for i in order:
        u, v = base.edges[i]
        sigma = spec.sigma[i]
        pu, pv = where[("v", u)], where[("v", v)]
        if (pu.part != pv.part) != bool(sigma % 2):
            raise AssertionError(f"edge {i}: endpoint parts do not match the parity of sigma = {sigma}")
        if sigma % 2:
            ends, roles = (u, v), ("odd", "odd")
        else:
            # the shorter stem goes to the endpoint with more spare degree
            du, dv = emb.pattern.degree(pu), emb.pattern.degree(pv)
            ends = (u, v) if du <= dv else (v, u)
            roles = ("even_j1", "even_j2")
        trees, nodes, retries = [], [], 0
        for end, role in zip(ends, roles):
            bp = build_tree_blueprint(sigma, role, D, a)
            pat = [where[("v", end)]] + [None] * (len(bp.parent) - 1)
            for t in range(1, len(bp.parent)):
                ext = extend_leaf(emb, pat[bp.parent[t]], bound_n, D, mode, s_max=s_max, budget=budget)
                emb, pat[t] = ext.embedding, ext.leaf
                retries += ext.retries
                _check_state(emb, bound_n, D)
            trees.append(bp)
            nodes.append(pat)
        leaf_parts = {emb.forward[nodes[j][bp.leaves()[0]]].part for j, bp in enumerate(trees)}
        if len(leaf_parts) != 2:
            raise AssertionError(f"edge {i}: leaf sets lie in the same host part")
        x1, x2 = _crossing(emb, trees, nodes, maps)
        keep = [set(trees[0].path_to_root(x1)), set(trees[1].path_to_root(x2))]
        doomed = []
        for j in (0, 1):
            doomed.extend(nodes[j][t] for t in reversed(range(1, len(nodes[j]))) if t not in keep[j])
        emb = prune(emb, doomed)
        emb = emb.with_edge(nodes[0][x1], nodes[1][x2])
        if mode == "certified":
            res = verify_good(emb, 2 * bound_n, D, budget=budget)
        else:
            res = verify_good(emb, 2 * bound_n, D, "capped", max_size=s_max, budget=budget)
        if not res:
            raise AssertionError(f"edge {i}: embedding lost goodness after pruning: {res.witness}")
        chain_ = [nodes[0][t] for t in reversed(trees[0].path_to_root(x1))]
        chain_ += [nodes[1][t] for t in trees[1].path_to_root(x2)]
        if ends[0] != u:
            chain_.reverse()
        for j in range(1, sigma):
            where[("e", i, j)] = chain_[j]
        h1, h2 = emb.forward[nodes[0][x1]], emb.forward[nodes[1][x2]]
        reports.append(EdgeReport(
            i, sigma, roles, tuple(bp.path_length for bp in trees), trees[0].branch_height,
            tuple(len(bp.parent) - 1 for bp in trees), retries, len(doomed),
            (_to_host(h1, maps), _to_host(h2, maps)),
        ))
    image = {lab: _to_host(emb.forward[p], maps) for lab, p in where.items()}
    audit = audit_image(sd, image, host)
    return SubdivisionEmbedding(sd, image, emb, extraction, reports, audit, mode, D)


def _to_host(ref: VertexRef, maps) -> VertexRef:
    return VertexRef(ref.part, maps[ref.part][ref.index])


def _crossing(emb, trees, nodes, maps):
    """Lexicographically least host pair (leaf of T1, leaf of T2) that is an edge."""
    L1 = {emb.forward[nodes[0][t]].index: t for t in trees[0].leaves()}
    L2 = {emb.forward[nodes[1][t]].index: t for t in trees[1].leaves()}
    p1 = emb.forward[nodes[0][trees[0].leaves()[0]]].part
    host = emb.host
    m2 = 0
    for j in L2:
        m2 |= 1 << j
    for j1 in sorted(L1):
        hit = host.adj(p1, j1) & m2
        if hit:
            j2 = next(iter_bits(hit))
            return L1[j1], L2[j2]
    p2 = 3 - p1
    raise NoCrossingEdge(
        VertexSet(p1, sorted(maps[p1][j] for j in L1)),
        VertexSet(p2, sorted(maps[p2][j] for j in L2)),
    )
