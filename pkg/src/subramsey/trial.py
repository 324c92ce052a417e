"""Desk-scale trials: sample a host, colour it, take the majority class, and
try to certify joinedness and embed the target subdivision in that class."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bigraph import BipartiteGraph
from .errors import EnumerationBudgetExceeded, SubRamseyError
from .joinedness import alpha_size, is_alpha_joined
from .quasirandom import sample_host
from .subdivision import BaseGraph, SubdivisionSpec, embed_subdivision

STRATEGIES = ("uniform_random", "biclique_blank", "round_robin")
THREADS_ENV = "SUBRAMSEY_THREADS"


def default_jobs() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _colour_rng(seed: int) -> np.random.Generator:
    # third counter word keeps this stream apart from host sampling
    return np.random.Generator(np.random.Philox(key=seed & ((1 << 64) - 1), counter=1 << 128))


@dataclass(frozen=True)
class Coloring:
    r: int
    edges: tuple
    colors: tuple
    hole: tuple | None = None

    def counts(self) -> list[int]:
        out = [0] * self.r
        for c in self.colors:
            out[c] += 1
        return out

    def class_edges(self, c: int) -> list:
        return [e for e, k in zip(self.edges, self.colors) if k == c]


def color_edges(
    g: BipartiteGraph, r: int, strategy: str = "uniform_random", *, seed: int = 0, alpha=None, hole="random"
) -> Coloring:
    """Total ``r``-colouring of ``g`` in canonical (sorted) edge order.

    ``biclique_blank`` draws a ``ceil(alpha N)`` by ``ceil(alpha N)`` pair
    (``hole="aligned"`` takes the lowest indices) and gives colour 1 to the
    edges inside it and colour 0 to the rest.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    edges = tuple(g.edges())
    m = len(edges)
    if r == 1:
        return Coloring(1, edges, (0,) * m)
    if strategy == "round_robin":
        return Coloring(r, edges, tuple(i % r for i in range(m)))
    if strategy == "uniform_random":
        cols = _colour_rng(seed).integers(0, r, size=m)
        return Coloring(r, edges, tuple(int(c) for c in cols))
    if strategy == "biclique_blank":
        if alpha is None:
            raise ValueError("biclique_blank needs alpha")
        a1 = alpha_size(alpha, g.size1)
        a2 = alpha_size(alpha, g.size2)
        if hole == "aligned":
            A, B = range(a1), range(a2)
        else:
            rng = _colour_rng(seed)
            A = rng.choice(g.size1, a1, replace=False)
            B = rng.choice(g.size2, a2, replace=False)
        A = sorted(int(x) for x in A)
        B = sorted(int(x) for x in B)
        sa, sb = set(A), set(B)
        cols = tuple(1 if i in sa and j in sb else 0 for i, j in edges)
        return Coloring(r, edges, cols, (tuple(A), tuple(B)))
    raise ValueError(f"unknown strategy {strategy!r}")


@dataclass
class TrialConfig:
    N: int
    p: float
    alpha: float
    r: int = 2
    strategy: str = "uniform_random"
    seed: int = 0
    edges: list = field(default_factory=lambda: [[0, 1]])
    sigma: list = field(default_factory=lambda: [14])
    mode: str = "greedy"
    s_max: int = 2
    force_embed: bool = False
    hole: str = "random"
    joined_budget: int | None = None
    sample_jobs: int = 1
    timings: bool = False

    def __post_init__(self):
        if self.N < 1 or not 0 <= self.p <= 1 or self.alpha <= 0 or self.r < 1:
            raise ValueError("N, p, alpha and r must be positive (p in [0, 1])")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if len(self.sigma) == 1 and len(self.edges) > 1:
            self.sigma = list(self.sigma) * len(self.edges)

    def spec(self) -> SubdivisionSpec:
        return SubdivisionSpec(BaseGraph.from_edges(self.edges), tuple(self.sigma))

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "TrialConfig":
        return cls(**data)


def default_config(**overrides) -> TrialConfig:
    """Default desk-scale fixture: N=512, p=40/512, alpha=1/32, r=2, one edge with sigma 14."""
    base = dict(N=512, p=40 / 512, alpha=1 / 32, r=2)
    base.update(overrides)
    return TrialConfig(**base)


@dataclass
class TrialReport:
    config: dict
    host_N: int
    host_edges: int
    color_counts: list
    chosen_color: int
    chosen_edges: int
    pigeonhole_ok: bool
    joined: bool | None
    joined_detail: dict
    embedding: dict | None = None
    error: dict | None = None
    timings: dict | None = None

    @property
    def embedded(self) -> bool:
        return bool(self.embedding and self.embedding["audit"]["pass"])

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "TrialReport":
        return cls(**data)


def _error_json(exc: Exception) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    for name in ("leaves1", "leaves2", "offending", "witness", "violations"):
        v = getattr(exc, name, None)
        if v is not None:
            out[name] = _plain(v)
    return out


def _plain(v):
    if hasattr(v, "members"):
        return list(v.members)
    if hasattr(v, "to_json"):
        return v.to_json()
    if isinstance(v, (tuple, list)):
        return [_plain(x) for x in v]
    return v


def run_trial(config: TrialConfig) -> TrialReport:
    clock = {}
    t0 = time.perf_counter()
    host = sample_host(config.N, config.p, config.seed, jobs=config.sample_jobs)
    clock["sample"] = time.perf_counter() - t0
    colouring = color_edges(host, config.r, config.strategy, seed=config.seed, alpha=config.alpha, hole=config.hole)
    counts = colouring.counts()
    chosen = counts.index(max(counts))
    e = host.num_edges
    pigeonhole = counts[chosen] * config.r >= e
    cls = host.spanning(colouring.class_edges(chosen))

    t0 = time.perf_counter()
    try:
        verdict = is_alpha_joined(cls, config.alpha, budget=config.joined_budget)
        joined = verdict.joined
        detail = verdict.to_json()
    except EnumerationBudgetExceeded as exc:
        joined = None
        detail = {"undecided": str(exc)}
    clock["joined"] = time.perf_counter() - t0

    embedding = error = None
    if joined or config.force_embed:
        t0 = time.perf_counter()
        try:
            res = embed_subdivision(cls, config.spec(), config.alpha, mode=config.mode, s_max=config.s_max)
            embedding = res.to_json()
        except SubRamseyError as exc:
            error = _error_json(exc)
        clock["embed"] = time.perf_counter() - t0
    return TrialReport(
        config=config.to_json(),
        host_N=config.N,
        host_edges=e,
        color_counts=counts,
        chosen_color=chosen,
        chosen_edges=counts[chosen],
        pigeonhole_ok=pigeonhole,
        joined=joined,
        joined_detail=detail,
        embedding=embedding,
        error=error,
        timings=clock if config.timings else None,
    )


def _trial_json(config_json: dict) -> dict:
    return run_trial(TrialConfig.from_json(config_json)).to_json()


def run_batch(config: TrialConfig, trials: int, jobs: int | None = None) -> dict:
    """``trials`` runs with seeds ``config.seed + i``; order of reports follows ``i``."""
    jobs = default_jobs() if jobs is None else jobs
    configs = []
    for i in range(trials):
        c = asdict(config)
        c["seed"] = config.seed + i
        configs.append(c)
    if jobs <= 1 or trials <= 1:
        reports = [_trial_json(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_trial_json, configs))
    embedded = sum(1 for r in reports if r["embedding"] and r["embedding"]["audit"]["pass"])
    return {
        "trials": trials,
        "config": asdict(config),
        "embedded": embedded,
        "success_rate": embedded / trials if trials else 0.0,
        "joined": sum(1 for r in reports if r["joined"] is True),
        "not_joined": sum(1 for r in reports if r["joined"] is False),
        "undecided": sum(1 for r in reports if r["joined"] is None),
        "pigeonhole_all": all(r["pigeonhole_ok"] for r in reports),
        "reports": reports,
    }
