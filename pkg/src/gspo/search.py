"""Greedy sparsest-poset search.

Both searches walk a neighborhood graph over posets, looking for a strictly
sparser minimal IMAP along weakly decreasing paths and jumping to the first
one found, until no such path exists. The Hasse variant moves between posets
differing in a single ordered pair; the mark-change variant moves to the
ancestor posets of graphs one legitimate mark change away.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable

from .ci import CIOracle
from .equivalence import _apply_unchecked, legitimate_mark_changes
from .imap import MinimalImapCache
from .posets import Poset, ancestor_poset, poset_to_json
from .rng import substream

INIT_EMPTY = "empty"
INIT_MIN_DEGREE = "min_degree"
INIT_GIVEN = "given"


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the greedy searches.

    depth bounds the mark-change DFS; restarts and rng_seed drive the
    restart wrapper; max_steps aborts runaway searches with the trace
    attached.
    """

    depth: int = 4
    restarts: int = 5
    initialization: str = INIT_EMPTY
    rng_seed: int = 0
    max_steps: int | None = None
    start: Poset | None = None

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.initialization not in (INIT_EMPTY, INIT_MIN_DEGREE, INIT_GIVEN):
            raise ValueError(f"unknown initialization {self.initialization!r}")
        if self.initialization == INIT_GIVEN and self.start is None:
            raise ValueError("initialization 'given' needs a start poset")


@dataclass
class TraceRecord:
    step: int
    poset: Poset
    edges: int
    queries: int


@dataclass
class SearchTrace:
    """Accepted moves of one search run, sparsest last."""

    records: list[TraceRecord] = field(default_factory=list)

    @property
    def final_poset(self) -> Poset:
        return self.records[-1].poset

    @property
    def final_edges(self) -> int:
        return self.records[-1].edges

    def to_jsonl(self) -> str:
        lines = []
        for rec in self.records:
            lines.append(
                json.dumps(
                    {
                        "step": rec.step,
                        "poset": poset_to_json(rec.poset)["relations"],
                        "edges": rec.edges,
                        "queries": rec.queries,
                    },
                    separators=(",", ":"),
                )
            )
        return "\n".join(lines) + ("\n" if lines else "")


class SearchAborted(RuntimeError):
    """Raised when max_steps is exhausted; carries the partial trace."""

    def __init__(self, trace: SearchTrace):
        self.trace = trace
        super().__init__("search aborted: max_steps exhausted")


class _Budget:
    def __init__(self, limit: int | None, trace: SearchTrace):
        self.limit = limit
        self.spent = 0
        self.trace = trace

    def spend(self) -> None:
        self.spent += 1
        if self.limit is not None and self.spent > self.limit:
            raise SearchAborted(self.trace)


def _dfs_first_improvement(
    root: Poset,
    root_edges: int,
    neighbors: Callable[[Poset], Iterable[Poset]],
    edges_of: Callable[[Poset], int],
    depth_limit: int | None,
    budget: _Budget,
) -> Poset | None:
    """Depth-first search along equal-sparsity posets; returns the first
    strictly sparser poset encountered, or None."""
    visited = {root}
    stack = [(root, iter(neighbors(root)))]
    while stack:
        _node, it = stack[-1]
        child = next(it, None)
        if child is None:
            stack.pop()
            continue
        if child in visited:
            continue
        visited.add(child)
        budget.spend()
        e = edges_of(child)
        if e < root_edges:
            return child
        if e == root_edges and (depth_limit is None or len(stack) < depth_limit):
            stack.append((child, iter(neighbors(child))))
    return None


def _greedy(
    start: Poset,
    neighbors: Callable[[Poset], Iterable[Poset]],
    edges_of: Callable[[Poset], int],
    depth_limit: int | None,
    max_steps: int | None,
    queries: Callable[[], int],
) -> SearchTrace:
    trace = SearchTrace()
    budget = _Budget(max_steps, trace)
    current = start
    current_edges = edges_of(current)
    trace.records.append(TraceRecord(0, current, current_edges, queries()))
    step = 0
    while True:
        better = _dfs_first_improvement(
            current, current_edges, neighbors, edges_of, depth_limit, budget
        )
        if better is None:
            return trace
        step += 1
        current = better
        current_edges = edges_of(current)
        trace.records.append(TraceRecord(step, current, current_edges, queries()))


def gspo_hasse(
    oracle: CIOracle,
    start: Poset | None = None,
    config: SearchConfig | None = None,
    depth_limit: int | None = None,
) -> tuple:
    """Greedy sparsest-poset search over the Hasse diagram of all posets.

    Unbounded depth by default. Returns (graph, trace).
    """
    config = config or SearchConfig()
    if start is None:
        start = Poset.empty(oracle.num_variables)
    cache = MinimalImapCache(oracle)
    trace = _greedy(
        start,
        lambda p: p.hasse_neighbors(),
        lambda p: cache.graph_for(p).num_edges,
        depth_limit,
        config.max_steps,
        lambda: oracle.queries,
    )
    return cache.graph_for(trace.final_poset), trace


def gspo(
    oracle: CIOracle,
    start: Poset | None = None,
    config: SearchConfig | None = None,
    cache: MinimalImapCache | None = None,
) -> tuple:
    """Greedy sparsest-poset search over mark-change moves.

    From the minimal IMAP of the current poset, each legitimate mark change
    yields a Markov-equivalent graph whose ancestor poset is a neighbor; a
    DFS of depth at most config.depth accepts the first strictly sparser
    neighbor. Returns (graph, trace).
    """
    config = config or SearchConfig()
    if start is None:
        start = Poset.empty(oracle.num_variables)
    if cache is None:
        cache = MinimalImapCache(oracle)
    neighbor_memo: dict = {}

    def neighbors(p: Poset) -> list[Poset]:
        g = cache.graph_for(p)
        cached = neighbor_memo.get(g)
        if cached is None:
            cached = []
            seen = set()
            for change in legitimate_mark_changes(g):
                tau = ancestor_poset(_apply_unchecked(g, change))
                if tau not in seen:
                    seen.add(tau)
                    cached.append(tau)
            neighbor_memo[g] = cached
        return cached

    trace = _greedy(
        start,
        neighbors,
        lambda p: cache.graph_for(p).num_edges,
        config.depth,
        config.max_steps,
        lambda: oracle.queries,
    )
    return cache.graph_for(trace.final_poset), trace


def min_degree_poset(oracle: CIOracle) -> Poset:
    """Total order from the minimum-degree heuristic.

    Join i and j when they are dependent given everything else, then
    repeatedly extract a minimum-degree vertex (ties to the smallest index);
    vertices extracted earlier end up later in the order.
    """
    n = oracle.num_variables
    full = (1 << n) - 1
    adj = [0] * n
    for i, j in combinations(range(n), 2):
        rest = full & ~(1 << i) & ~(1 << j)
        if not oracle.independent_mask(i, j, rest):
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    remaining = full
    order: list[int] = []
    while remaining:
        best = min(
            (v for v in range(n) if remaining >> v & 1),
            key=lambda v: ((adj[v] & remaining).bit_count(), v),
        )
        order.insert(0, best)
        remaining &= ~(1 << best)
    return Poset.total(order)


def _initial_poset(oracle: CIOracle, config: SearchConfig) -> Poset:
    if config.initialization == INIT_EMPTY:
        return Poset.empty(oracle.num_variables)
    if config.initialization == INIT_MIN_DEGREE:
        return min_degree_poset(oracle)
    assert config.start is not None
    if config.start.n != oracle.num_variables:
        raise ValueError("start poset and oracle disagree on the variable count")
    return config.start


def _perturb(poset: Poset, rng) -> Poset:
    if poset.n < 2:
        return poset
    moves = int(rng.integers(1, poset.n + 1))
    current = poset
    for _ in range(moves):
        nbrs = current.hasse_neighbors()
        if not nbrs:
            break
        current = nbrs[int(rng.integers(len(nbrs)))]
    return current


@dataclass
class RestartOutcome:
    graph: object
    poset: Poset
    trace: SearchTrace
    traces: list[SearchTrace]


def run_restarts(oracle: CIOracle, config: SearchConfig | None = None) -> RestartOutcome:
    """Run gspo from config.restarts starting posets and keep the sparsest
    result (ties to the earliest restart).

    Restart 0 starts from the configured initialization; later restarts
    perturb it by a random number of Hasse moves drawn from a per-restart
    substream of config.rng_seed.
    """
    config = config or SearchConfig()
    base = _initial_poset(oracle, config)
    cache = MinimalImapCache(oracle)
    best: tuple[object, SearchTrace] | None = None
    traces: list[SearchTrace] = []
    for r in range(config.restarts):
        start = base if r == 0 else _perturb(base, substream(config.rng_seed, "restarts", r))
        graph, trace = gspo(oracle, start, config, cache=cache)
        traces.append(trace)
        if best is None or graph.num_edges < best[0].num_edges:
            best = (graph, trace)
    assert best is not None
    return RestartOutcome(best[0], best[1].final_poset, best[1], traces)
