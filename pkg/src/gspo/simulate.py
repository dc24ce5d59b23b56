"""Synthetic pipeline: random weighted DAGs, linear-Gaussian sampling,
latent projection to observed-variable graphs, metrics, and the benchmark
sweep over (alpha, sample size) grids.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import combinations
from statistics import fmean, median

import numpy as np

from .ci import CachingOracle, DegenerateInputError, GaussianCITester
from .graphs import MixedGraph
from .rng import substream
from .search import SearchAborted, SearchConfig, run_restarts
from .separation import m_connected_mask
from .util import mask_of


@dataclass(frozen=True)
class SimulationSpec:
    """Parameters of one synthetic setting.

    observed counts the retained variables, latents the marginalized ones;
    expected_neighbors tunes the Erdos-Renyi edge probability on the full
    node set. Weights are uniform on +-[weight_low, weight_high].
    """

    observed: int
    latents: int = 0
    expected_neighbors: float = 3.0
    samples: int = 0
    weight_low: float = 0.25
    weight_high: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.observed < 1:
            raise ValueError("observed must be at least 1")
        if self.latents < 0 or self.samples < 0:
            raise ValueError("latents and samples must be non-negative")
        if self.expected_neighbors < 0:
            raise ValueError("expected_neighbors must be non-negative")
        if not 0 < self.weight_low <= self.weight_high:
            raise ValueError("need 0 < weight_low <= weight_high")

    @property
    def num_nodes(self) -> int:
        return self.observed + self.latents


@dataclass(frozen=True)
class WeightedDAG:
    """A DAG plus its edge-weight matrix; weights[i, j] != 0 iff i->j."""

    dag: MixedGraph
    weights: np.ndarray

    def __post_init__(self):
        n = self.dag.n
        if self.weights.shape != (n, n):
            raise ValueError("weight matrix shape must match the vertex count")
        if self.dag.bidirected_edges() or not self.dag.is_ancestral():
            raise ValueError("graph must be a DAG")
        support = {(int(i), int(j)) for i, j in np.argwhere(self.weights)}
        if support != set(self.dag.directed_edges()):
            raise ValueError("weight support must match the edge set exactly")


def sample_weighted_dag(
    spec: SimulationSpec,
    rng_graph: np.random.Generator,
    rng_weights: np.random.Generator | None = None,
) -> WeightedDAG:
    """Erdos-Renyi DAG with vertex labels as the topological order.

    Each pair i < j gets an edge i -> j with probability
    expected_neighbors / (num_nodes - 1). Latent labels 0..latents-1 sit
    upstream, so marginalizing them acts as confounding rather than
    selection.
    """
    if rng_weights is None:
        rng_weights = rng_graph
    m = spec.num_nodes
    prob = min(1.0, spec.expected_neighbors / (m - 1)) if m > 1 else 0.0
    directed = []
    for a in range(m):
        for b in range(a + 1, m):
            if rng_graph.random() < prob:
                directed.append((a, b))
    weights = np.zeros((m, m))
    for i, j in sorted(directed):
        w = rng_weights.uniform(spec.weight_low, spec.weight_high)
        if rng_weights.random() < 0.5:
            w = -w
        weights[i, j] = w
    return WeightedDAG(MixedGraph(m, directed), weights)


def sample_data(
    wd: WeightedDAG, num_samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw rows of X solving X = W^T X + eps, eps ~ N(0, I).

    Returns an (num_samples, num_nodes) matrix over all nodes; callers drop
    latent columns themselves.
    """
    n = wd.dag.n
    data = rng.standard_normal((num_samples, n))
    order = sorted(range(n), key=lambda v: wd.dag.ancestor_masks()[v].bit_count())
    for j in order:
        for i in wd.dag.parents(j):
            data[:, j] += wd.weights[i, j] * data[:, i]
    return data


def population_covariance(wd: WeightedDAG) -> np.ndarray:
    """Exact covariance (I - W)^-T (I - W)^-1 of the SEM."""
    n = wd.dag.n
    inv = np.linalg.inv(np.eye(n) - wd.weights)
    return inv.T @ inv


def latent_projection(dag: MixedGraph, observed) -> MixedGraph:
    """Marginalize a DAG onto the observed vertices.

    Observed i, j are adjacent iff they stay d-connected given the observed
    ancestors of the pair (for DAG inputs this decides existence of any
    observed separating set); marks follow ancestry in the full DAG.
    Vertices are relabeled 0..len(observed)-1 in the given order.
    """
    observed = list(observed)
    if dag.bidirected_edges() or not dag.is_ancestral():
        raise ValueError("input must be a DAG")
    if len(set(observed)) != len(observed):
        raise ValueError("observed vertices must be distinct")
    anc = dag.ancestor_masks()
    obs_mask = mask_of(observed)
    index = {v: k for k, v in enumerate(observed)}
    directed, bidirected = [], []
    for a, b in combinations(range(len(observed)), 2):
        i, j = observed[a], observed[b]
        pair = (1 << i) | (1 << j)
        sep = (anc[i] | anc[j]) & obs_mask & ~pair
        if m_connected_mask(dag, i, j, sep):
            if anc[j] >> i & 1:
                directed.append((index[i], index[j]))
            elif anc[i] >> j & 1:
                directed.append((index[j], index[i]))
            else:
                bidirected.append((index[i], index[j]))
    out = MixedGraph(len(observed), directed, bidirected)
    assert out.is_ancestral()
    return out


def latent_projection_exhaustive(dag: MixedGraph, observed) -> MixedGraph:
    """Reference projection deciding adjacency by trying every observed
    subset as a separator. Only for small graphs."""
    observed = list(observed)
    if len(observed) > 10:
        raise ValueError("exhaustive projection supports at most 10 observed")
    if dag.bidirected_edges() or not dag.is_ancestral():
        raise ValueError("input must be a DAG")
    anc = dag.ancestor_masks()
    index = {v: k for k, v in enumerate(observed)}
    directed, bidirected = [], []
    for a, b in combinations(range(len(observed)), 2):
        i, j = observed[a], observed[b]
        rest = [v for v in observed if v != i and v != j]
        seps = (
            mask_of(sub)
            for r in range(len(rest) + 1)
            for sub in combinations(rest, r)
        )
        if all(m_connected_mask(dag, i, j, s) for s in seps):
            if anc[j] >> i & 1:
                directed.append((index[i], index[j]))
            elif anc[i] >> j & 1:
                directed.append((index[j], index[i]))
            else:
                bidirected.append((index[i], index[j]))
    return MixedGraph(len(observed), directed, bidirected)


def sample_projected_dmag(
    spec: SimulationSpec, replicate: int = 0
) -> tuple[WeightedDAG, MixedGraph]:
    """One pipeline draw: weighted DAG plus its projection onto the observed
    vertices (latents occupy indices 0..latents-1)."""
    wd = sample_weighted_dag(
        spec,
        substream(spec.seed, "graph", replicate),
        substream(spec.seed, "weights", replicate),
    )
    dmag = latent_projection(wd.dag, range(spec.latents, spec.num_nodes))
    return wd, dmag


# -- metrics -------------------------------------------------------------------


@dataclass(frozen=True)
class SkeletonMetrics:
    shd: int
    tpr: float
    fpr: float
    precision: float
    recall: float


def skeleton_metrics(truth: MixedGraph, estimate: MixedGraph) -> SkeletonMetrics:
    """Skeleton agreement over the C(n, 2) unordered-pair universe.

    Conventions at empty denominators: tpr = recall = 1 with no true edges,
    fpr = 0 with no true non-edges, precision = 1 with no estimated edges.
    """
    if truth.n != estimate.n:
        raise ValueError("graphs must share a vertex count")
    t, e = truth.skeleton(), estimate.skeleton()
    pairs = truth.n * (truth.n - 1) // 2
    tp = len(t & e)
    fp = len(e - t)
    fn = len(t - e)
    return SkeletonMetrics(
        shd=fp + fn,
        tpr=tp / len(t) if t else 1.0,
        fpr=fp / (pairs - len(t)) if pairs > len(t) else 0.0,
        precision=tp / len(e) if e else 1.0,
        recall=tp / len(t) if t else 1.0,
    )


# -- benchmark sweep -------------------------------------------------------------

_CSV_COLUMNS = (
    "replicate",
    "p",
    "K",
    "s",
    "n",
    "alpha",
    "shd",
    "tpr",
    "fpr",
    "precision",
    "recall",
    "runtime_ms",
    "queries",
    "error",
)


@dataclass(frozen=True)
class BenchmarkRow:
    replicate: int
    p: int
    K: int
    s: float
    n: int
    alpha: float
    shd: int | None = None
    tpr: float | None = None
    fpr: float | None = None
    precision: float | None = None
    recall: float | None = None
    runtime_ms: float | None = None
    queries: int | None = None
    error: str = ""


def replicate_seed(seed: int, replicate: int) -> int:
    """Stable per-replicate seed for the restart perturbation stream."""
    return int(substream(seed, "replicate", replicate).integers(2**63 - 1))


def _benchmark_replicate(args) -> list[BenchmarkRow]:
    spec, config, alphas, sample_sizes, replicate = args
    wd, truth = sample_projected_dmag(spec, replicate)
    n_max = max(sample_sizes)
    data = sample_data(wd, n_max, substream(spec.seed, "noise", replicate))
    obs = data[:, spec.latents :]
    config = replace(config, rng_seed=replicate_seed(spec.seed, replicate))
    rows = []
    for alpha in alphas:
        for n in sample_sizes:
            base = dict(
                replicate=replicate,
                p=spec.observed,
                K=spec.latents,
                s=spec.expected_neighbors,
                n=n,
                alpha=alpha,
            )
            if n < 4:
                rows.append(BenchmarkRow(**base, error="too few samples"))
                continue
            started = time.perf_counter()
            try:
                oracle = CachingOracle(GaussianCITester.from_data(obs[:n], alpha))
                outcome = run_restarts(oracle, config)
            except (DegenerateInputError, SearchAborted, ValueError) as exc:
                rows.append(
                    BenchmarkRow(**base, error=f"{type(exc).__name__}: {exc}")
                )
                continue
            elapsed_ms = (time.perf_counter() - started) * 1000.0
            m = skeleton_metrics(truth, outcome.graph)
            rows.append(
                BenchmarkRow(
                    **base,
                    shd=m.shd,
                    tpr=m.tpr,
                    fpr=m.fpr,
                    precision=m.precision,
                    recall=m.recall,
                    runtime_ms=elapsed_ms,
                    queries=oracle.queries,
                )
            )
    return rows


def run_benchmark(
    spec: SimulationSpec,
    config: SearchConfig,
    alphas,
    sample_sizes,
    replicates: int,
    jobs: int = 1,
) -> list[BenchmarkRow]:
    """Sweep replicates x alphas x sample sizes.

    Per-run failures become error rows rather than aborting. Rows come back
    in (replicate, alpha, n) order regardless of jobs.
    """
    alphas = [float(a) for a in alphas]
    sample_sizes = [int(n) for n in sample_sizes]
    if not alphas or not sample_sizes or replicates < 1:
        raise ValueError("need at least one alpha, sample size, and replicate")
    tasks = [(spec, config, alphas, sample_sizes, r) for r in range(replicates)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_benchmark_replicate, tasks))
    else:
        chunks = [_benchmark_replicate(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def rows_to_csv(rows) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for row in rows:
        cells = []
        for col in _CSV_COLUMNS:
            value = getattr(row, col)
            if value is None:
                cells.append("")
            elif col == "error":
                cells.append(value.replace(",", ";").replace("\n", " "))
            else:
                cells.append(repr(value) if isinstance(value, float) else str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def aggregate_rows(rows) -> dict:
    """Per-(alpha, n) cell summaries: mean metrics, mean and median runtime,
    query counts, error tallies."""
    cells: dict[tuple[float, int], list[BenchmarkRow]] = {}
    for row in rows:
        cells.setdefault((row.alpha, row.n), []).append(row)
    out = []
    for alpha, n in sorted(cells):
        group = cells[(alpha, n)]
        ok = [r for r in group if not r.error]
        entry: dict = {
            "alpha": alpha,
            "n": n,
            "replicates": len(group),
            "errors": len(group) - len(ok),
        }
        if ok:
            entry.update(
                mean_shd=fmean(r.shd for r in ok),
                mean_tpr=fmean(r.tpr for r in ok),
                mean_fpr=fmean(r.fpr for r in ok),
                mean_precision=fmean(r.precision for r in ok),
                mean_recall=fmean(r.recall for r in ok),
                mean_runtime_ms=fmean(r.runtime_ms for r in ok),
                median_runtime_ms=median(r.runtime_ms for r in ok),
                mean_queries=fmean(r.queries for r in ok),
            )
        out.append(entry)
    return {"cells": out}
