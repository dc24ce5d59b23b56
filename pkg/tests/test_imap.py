import numpy as np
import pytest

from gspo.ci import GraphOracle, PartialCorrelationOracle
from gspo.equivalence import is_maximal, maximal_closure
from gspo.graphs import MixedGraph
from gspo.imap import (
    MinimalImapCache,
    check_restricted_faithfulness,
    imap_witness,
    is_imap,
    is_minimal_imap,
    poset_to_ancestral_graph,
    poset_to_minimal_imap,
)
from gspo.posets import Poset, ancestor_poset
from gspo.rng import substream
from gspo.separation import independence_model
from gspo.simulate import WeightedDAG, population_covariance
from gspo.verify import random_ancestral_graph, random_poset


def test_induced_graph_collider_example(collider_truth, collider_poset):
    oracle = GraphOracle(collider_truth)
    g = poset_to_ancestral_graph(collider_poset, oracle)
    assert g.directed_edges() == [(1, 2)]
    assert sorted(g.bidirected_edges()) == [(0, 1), (0, 2), (1, 3)]
    assert not is_imap(g, oracle)
    assert imap_witness(g, oracle) == (2, 3, frozenset({1}))


def test_induced_graph_confounded_example(confounded_truth, confounded_poset):
    oracle = GraphOracle(confounded_truth)
    first = poset_to_ancestral_graph(confounded_poset, oracle)
    derived = ancestor_poset(first)
    inner = poset_to_ancestral_graph(derived, oracle)
    assert inner.directed_edges() == [(0, 1), (2, 3), (4, 3)]
    assert sorted(inner.bidirected_edges()) == [
        (0, 2),
        (0, 3),
        (0, 4),
        (1, 2),
        (1, 4),
        (2, 4),
    ]
    assert ancestor_poset(inner) == confounded_poset
    closed = maximal_closure(inner)
    assert is_imap(closed, oracle)
    assert is_minimal_imap(closed, oracle)


def test_minimal_imap_matches_defining_formula():
    rng = substream(0, "verify", 109)
    for _ in range(25):
        n = int(rng.integers(3, 6))
        truth = maximal_closure(random_ancestral_graph(n, rng))
        oracle = GraphOracle(truth)
        poset = random_poset(n, rng)
        got = poset_to_minimal_imap(poset, oracle)
        first = poset_to_ancestral_graph(poset, oracle)
        inner = poset_to_ancestral_graph(ancestor_poset(first), oracle)
        assert got == maximal_closure(inner)


def test_minimal_imap_output_properties():
    rng = substream(0, "verify", 110)
    for _ in range(40):
        n = int(rng.integers(3, 7))
        truth = maximal_closure(random_ancestral_graph(n, rng))
        oracle = GraphOracle(truth)
        g = poset_to_minimal_imap(random_poset(n, rng), oracle)
        assert g.is_ancestral()
        assert is_maximal(g)
        assert is_imap(g, oracle)
        assert is_minimal_imap(g, oracle)


def test_poset_of_output_matches_poset_of_induced_graph():
    rng = substream(0, "verify", 111)
    for _ in range(40):
        n = int(rng.integers(3, 7))
        truth = maximal_closure(random_ancestral_graph(n, rng))
        oracle = GraphOracle(truth)
        poset = random_poset(n, rng)
        first = poset_to_ancestral_graph(poset, oracle)
        g = poset_to_minimal_imap(poset, oracle)
        assert ancestor_poset(g) == ancestor_poset(first)


def test_cache_reuses_derived_posets(collider_truth, collider_poset):
    oracle = GraphOracle(collider_truth)
    cache = MinimalImapCache(oracle)
    first = poset_to_minimal_imap(collider_poset, oracle, cache)
    before = oracle.queries
    again = poset_to_minimal_imap(collider_poset, oracle, cache)
    assert again == first
    assert oracle.queries == before
    with pytest.raises(ValueError):
        poset_to_minimal_imap(collider_poset, GraphOracle(collider_truth), cache)


def test_is_imap_matches_model_containment():
    rng = substream(0, "verify", 112)
    for _ in range(50):
        n = int(rng.integers(3, 6))
        truth = maximal_closure(random_ancestral_graph(n, rng))
        candidate = maximal_closure(random_ancestral_graph(n, rng))
        want = independence_model(candidate) <= independence_model(truth)
        assert is_imap(candidate, GraphOracle(truth)) == want


def test_truth_is_its_own_minimal_imap():
    rng = substream(0, "verify", 113)
    for _ in range(30):
        n = int(rng.integers(2, 7))
        truth = maximal_closure(random_ancestral_graph(n, rng))
        assert is_minimal_imap(truth, GraphOracle(truth))


def test_is_minimal_imap_rejects_non_imap(collider_truth, collider_poset):
    oracle = GraphOracle(collider_truth)
    not_imap = poset_to_ancestral_graph(collider_poset, oracle)
    with pytest.raises(ValueError):
        is_minimal_imap(not_imap, oracle)


def test_restricted_faithfulness_flags_cancelling_edge():
    # direct effect exactly cancelled by the indirect path
    tri = MixedGraph(3, [(0, 1), (1, 2), (0, 2)])
    weights = np.zeros((3, 3))
    weights[0, 1] = 1.0
    weights[1, 2] = 1.0
    weights[0, 2] = -1.0
    cov = population_covariance(WeightedDAG(tri, weights))
    report = check_restricted_faithfulness(tri, PartialCorrelationOracle(cov))
    assert not report.holds
    assert [(v.i, v.j, v.cond) for v in report.adjacency] == [(0, 2, frozenset())]


def test_restricted_faithfulness_is_weaker_than_full(cancelling_sem):
    # cov(0, 5) vanishes, but (0, 5) is not an edge, an unshielded triple
    # pair, or a discriminating pair, so the restricted clauses all hold
    cov = population_covariance(cancelling_sem)
    oracle = PartialCorrelationOracle(cov)
    assert oracle.independent(0, 5)
    report = check_restricted_faithfulness(cancelling_sem.dag, oracle)
    assert report.holds


def test_restricted_faithfulness_of_graph_oracle(collider_truth):
    report = check_restricted_faithfulness(
        collider_truth, GraphOracle(collider_truth)
    )
    assert report.holds
