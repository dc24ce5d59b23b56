"""Exact verification suites.

Each suite replays one of the package's structural claims against an
independent oracle: poset enumeration, exhaustive graph enumeration, brute
force path checking, or exhaustive separating-set search. Suites return a
SuiteResult and never raise on a failed check; the conjecture suite persists
failing instances as minimized counterexample files.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path as FilePath

import numpy as np

from .ci import CachingOracle, GraphOracle
from .equivalence import (
    enumerate_dmags,
    is_maximal,
    markov_equivalent,
    maximal_closure,
)
from .graphs import MixedGraph, graph_to_json
from .imap import (
    MinimalImapCache,
    is_imap,
    is_minimal_imap,
    poset_to_ancestral_graph,
    poset_to_minimal_imap,
)
from .posets import Poset, ancestor_poset, enumerate_posets, poset_to_json
from .rng import substream
from .search import SearchConfig, run_restarts
from .separation import (
    brute_force_m_connected,
    independence_model,
    m_connected_mask,
    separable_by_ancestors,
)
from .simulate import SimulationSpec, replicate_seed, sample_projected_dmag
from .util import mask_of


@dataclass
class SuiteResult:
    suite: str
    passed: bool
    checked: int
    failures: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _result(suite: str, checked: int, failures: list[str], **details) -> SuiteResult:
    return SuiteResult(suite, not failures, checked, failures[:50], dict(details))


# -- random instances -----------------------------------------------------------


def random_ancestral_graph(
    n: int, rng: np.random.Generator, edge_prob: float = 0.3
) -> MixedGraph:
    """Random ancestral mixed graph: directed edges follow a random order,
    bidirected placements rejected until none joins related vertices."""
    while True:
        order = [int(v) for v in rng.permutation(n)]
        directed, bidirected = [], []
        for a in range(n):
            for b in range(a + 1, n):
                if rng.random() >= edge_prob:
                    continue
                kind = int(rng.integers(3))
                if kind == 0:
                    directed.append((order[a], order[b]))
                elif kind == 1:
                    directed.append((order[b], order[a]))
                else:
                    bidirected.append((order[a], order[b]))
        g = MixedGraph(n, directed, bidirected)
        if g.is_ancestral():
            return g


def random_poset(n: int, rng: np.random.Generator, relation_prob: float = 0.35) -> Poset:
    """Random poset as the reachability order of a random DAG on 0..n-1."""
    order = [int(v) for v in rng.permutation(n)]
    pairs = [
        (order[a], order[b])
        for a in range(n)
        for b in range(a + 1, n)
        if rng.random() < relation_prob
    ]
    return Poset.from_relations(n, pairs)


def _random_dmag(seed: int, index: int, observed: int, latents: int = 3,
                 expected_neighbors: float = 3.0) -> MixedGraph:
    spec = SimulationSpec(
        observed=observed,
        latents=latents,
        expected_neighbors=expected_neighbors,
        seed=seed,
    )
    return sample_projected_dmag(spec, index)[1]


# -- suites ----------------------------------------------------------------------


def check_sparsest_poset(
    num_vertices: int = 4, graphs: int = 50, seed: int = 0
) -> SuiteResult:
    """Over every poset on num_vertices ground elements, the sparsest induced
    minimal IMAP of a graph oracle has exactly the true edge count, and every
    minimizer is Markov equivalent to the truth."""
    all_posets = list(enumerate_posets(num_vertices))
    failures: list[str] = []
    for idx in range(graphs):
        gstar = _random_dmag(seed, idx, num_vertices)
        oracle = CachingOracle(GraphOracle(gstar))
        cache = MinimalImapCache(oracle)
        best = None
        minimizers: list[MixedGraph] = []
        for poset in all_posets:
            g = cache.graph_for(poset)
            if best is None or g.num_edges < best:
                best = g.num_edges
                minimizers = [g]
            elif g.num_edges == best:
                minimizers.append(g)
        if best != gstar.num_edges:
            failures.append(
                f"graph {idx}: sparsest poset graph has {best} edges, "
                f"truth has {gstar.num_edges}"
            )
            continue
        for g in minimizers:
            if not markov_equivalent(g, gstar):
                failures.append(f"graph {idx}: a {best}-edge minimizer is not equivalent")
                break
    return _result(
        "sparsest-poset",
        graphs * len(all_posets),
        failures,
        num_vertices=num_vertices,
        posets=len(all_posets),
    )


def check_imap_filter(graphs: int = 25, seed: int = 0) -> SuiteResult:
    """Filter all 4-vertex graphs down to IMAPs of a random truth: minimum
    edge IMAPs must be equivalent to the truth, and every IMAP's skeleton
    must contain the truth's."""
    universe = list(enumerate_dmags(4))
    failures: list[str] = []
    checked = 0
    for idx in range(graphs):
        gstar = _random_dmag(seed, idx, 4)
        oracle = CachingOracle(GraphOracle(gstar))
        true_skel = gstar.skeleton()
        imaps = [h for h in universe if is_imap(h, oracle)]
        checked += len(universe)
        min_edges = min(h.num_edges for h in imaps)
        for h in imaps:
            if not true_skel <= h.skeleton():
                failures.append(f"graph {idx}: IMAP {h!r} misses a true adjacency")
            if h.num_edges == min_edges and not markov_equivalent(h, gstar):
                failures.append(f"graph {idx}: minimum IMAP {h!r} not equivalent")
    return _result("minimal-imap", checked, failures, universe=len(universe))


def check_gpi_minimality(pairs: int = 1000, seed: int = 0) -> SuiteResult:
    """Random (truth, poset) pairs: the induced graph must be a maximal
    ancestral minimal IMAP of the oracle."""
    rng = substream(seed, "verify")
    failures: list[str] = []
    for idx in range(pairs):
        p = int(rng.integers(3, 9))
        gstar = _random_dmag(seed, idx, p)
        poset = random_poset(p, rng)
        oracle = CachingOracle(GraphOracle(gstar))
        g = poset_to_minimal_imap(poset, oracle)
        if not (g.is_ancestral() and is_maximal(g)):
            failures.append(f"pair {idx}: output not maximal ancestral")
        elif not is_minimal_imap(g, oracle):
            failures.append(f"pair {idx}: output not a minimal IMAP")
    return _result("gpi-minimality", pairs, failures)


def check_mec_fixed_points(
    graphs: int = 100, posets: int = 1000, seed: int = 0
) -> SuiteResult:
    """Two fixed-point identities: rebuilding any equivalent graph from its
    own ancestor order returns it unchanged, and the induced graph's ancestor
    order equals that of the single-pass construction."""
    from .equivalence import enumerate_mec

    rng = substream(seed, "verify")
    failures: list[str] = []
    checked = 0
    for idx in range(graphs):
        p = int(rng.integers(3, 6))
        gstar = _random_dmag(seed, idx, p)
        oracle = CachingOracle(GraphOracle(gstar))
        for h in enumerate_mec(gstar):
            checked += 1
            if poset_to_minimal_imap(ancestor_poset(h), oracle) != h:
                failures.append(f"graph {idx}: member {h!r} is not a fixed point")
    for idx in range(posets):
        p = int(rng.integers(3, 9))
        gstar = _random_dmag(seed, 10_000 + idx, p)
        poset = random_poset(p, rng)
        oracle = CachingOracle(GraphOracle(gstar))
        checked += 1
        if ancestor_poset(poset_to_minimal_imap(poset, oracle)) != ancestor_poset(
            poset_to_ancestral_graph(poset, oracle)
        ):
            failures.append(f"poset {idx}: ancestor order changed under closure")
    return _result("mec-fixed-point", checked, failures)


def check_separation_oracle(
    queries: int = 10000, num_vertices: int = 7, seed: int = 0
) -> SuiteResult:
    """Fast m-connection vs the literal path rule on random queries, plus
    exhaustive separating-set search vs the ancestor-set test."""
    rng = substream(seed, "verify")
    failures: list[str] = []
    done = 0
    while done < queries:
        n = int(rng.integers(3, num_vertices + 1))
        g = random_ancestral_graph(n, rng)
        for _ in range(min(20, queries - done)):
            i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
            smask = int(rng.integers(1 << n)) & ~(1 << i) & ~(1 << j)
            fast = m_connected_mask(g, i, j, smask)
            slow = brute_force_m_connected(
                g, i, j, [v for v in range(n) if smask >> v & 1]
            )
            done += 1
            if fast != slow:
                failures.append(f"{g!r}: ({i},{j}|{smask:b}) fast={fast} slow={slow}")
    # ancestor-set sufficiency against every candidate separating set
    pair_checks = 0
    for idx in range(200):
        n = int(rng.integers(3, 7))
        g = random_ancestral_graph(n, rng)
        for i, j in combinations(range(n), 2):
            if g.adjacent(i, j):
                continue
            pair_checks += 1
            separable, _ = separable_by_ancestors(g, i, j)
            rest = [v for v in range(n) if v != i and v != j]
            exhaustive = any(
                not m_connected_mask(g, i, j, mask_of(sub))
                for r in range(len(rest) + 1)
                for sub in combinations(rest, r)
            )
            if separable != exhaustive:
                failures.append(
                    f"{g!r}: pair ({i},{j}) ancestor-set={separable} "
                    f"exhaustive={exhaustive}"
                )
    return _result(
        "separation-oracle", done + pair_checks, failures, queries=done,
        pair_checks=pair_checks,
    )


def check_closure(
    num_vertices: int = 5, graphs: int = 200, seed: int = 0
) -> SuiteResult:
    """Closure invariants: identical independence model, maximality,
    idempotence, and edge monotonicity."""
    rng = substream(seed, "verify")
    failures: list[str] = []
    for idx in range(graphs):
        n = int(rng.integers(3, num_vertices + 1))
        g = random_ancestral_graph(n, rng)
        h = maximal_closure(g)
        if independence_model(g) != independence_model(h):
            failures.append(f"graph {idx}: closure changed the separation model")
        if not is_maximal(h):
            failures.append(f"graph {idx}: closure is not maximal")
        if maximal_closure(h) != h:
            failures.append(f"graph {idx}: closure is not idempotent")
        if not (set(g.directed_edges()) == set(h.directed_edges())
                and set(g.bidirected_edges()) <= set(h.bidirected_edges())):
            failures.append(f"graph {idx}: closure altered existing edges")
    return _result("closure", graphs, failures, num_vertices=num_vertices)


# -- conjecture mining ------------------------------------------------------------


def _search_recovers(gstar: MixedGraph, config: SearchConfig) -> tuple[bool, MixedGraph]:
    oracle = CachingOracle(GraphOracle(gstar))
    outcome = run_restarts(oracle, config)
    return markov_equivalent(outcome.graph, gstar), outcome.graph


def _minimize_counterexample(
    gstar: MixedGraph, config: SearchConfig
) -> tuple[MixedGraph, MixedGraph]:
    """Shrink a failing truth by vertex deletion (re-closing the induced
    graph) while the search still misses the equivalence class."""
    current = gstar
    learned = _search_recovers(gstar, config)[1]
    shrinking = True
    while shrinking and current.n > 2:
        shrinking = False
        for v in range(current.n):
            keep = [u for u in range(current.n) if u != v]
            candidate = maximal_closure(current.induced_subgraph(keep))
            ok, cand_learned = _search_recovers(candidate, config)
            if not ok:
                current, learned = candidate, cand_learned
                shrinking = True
                break
    return current, learned


def _conjecture_case(args) -> tuple[int, bool, dict | None]:
    seed, idx, min_observed, max_observed, latents, neighbors, depth, restarts = args
    p = min_observed + int(
        substream(seed, "verify", idx).integers(max_observed - min_observed + 1)
    )
    spec = SimulationSpec(
        observed=p, latents=latents, expected_neighbors=neighbors, seed=seed
    )
    gstar = sample_projected_dmag(spec, idx)[1]
    config = SearchConfig(
        depth=depth, restarts=restarts, rng_seed=replicate_seed(seed, idx)
    )
    ok, learned = _search_recovers(gstar, config)
    if ok:
        return idx, True, None
    small, small_learned = _minimize_counterexample(gstar, config)
    return idx, False, {
        "case": idx,
        "observed": p,
        "truth": graph_to_json(gstar),
        "learned": graph_to_json(learned),
        "minimized_truth": graph_to_json(small),
        "minimized_learned": graph_to_json(small_learned),
        "minimized_truth_poset": poset_to_json(ancestor_poset(small)),
        "depth": depth,
        "restarts": restarts,
        "seed": seed,
    }


def check_conjecture(
    runs: int = 500,
    seed: int = 0,
    min_observed: int = 4,
    max_observed: int = 8,
    latents: int = 3,
    expected_neighbors: float = 3.0,
    depth: int = 4,
    restarts: int = 5,
    required_rate: float = 0.98,
    dump_dir=None,
    jobs: int = 1,
) -> SuiteResult:
    """Oracle-mode search over random projected truths; every run must land
    in the truth's equivalence class. Failing truths are minimized and
    dumped as JSON counterexample candidates."""
    tasks = [
        (seed, idx, min_observed, max_observed, latents, expected_neighbors,
         depth, restarts)
        for idx in range(runs)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_conjecture_case, tasks, chunksize=4))
    else:
        outcomes = [_conjecture_case(t) for t in tasks]
    failures: list[str] = []
    dumped: list[str] = []
    for idx, ok, artifact in outcomes:
        if ok:
            continue
        failures.append(f"case {idx}: output outside the equivalence class")
        if dump_dir is not None and artifact is not None:
            path = FilePath(dump_dir) / f"counterexample_{idx}.json"
            path.write_text(json.dumps(artifact, indent=2) + "\n")
            dumped.append(str(path))
    rate = (runs - len(failures)) / runs if runs else 1.0
    result = _result(
        "conjecture", runs, failures, pass_rate=rate, dumped=dumped,
        depth=depth, restarts=restarts,
    )
    result.passed = rate >= required_rate
    return result
