import pytest

from gspo.graphs import (
    MixedGraph,
    discriminating_paths,
    edge_marks,
    graph_from_json,
    graph_to_json,
    has_discriminating_path,
    load_graph,
    path_between,
    save_graph,
)
from gspo.rng import substream
from gspo.verify import random_ancestral_graph


def test_rejects_bad_edges():
    with pytest.raises(ValueError):
        MixedGraph(2, [(0, 0)])
    with pytest.raises(ValueError):
        MixedGraph(2, [(0, 1)], [(0, 1)])
    with pytest.raises(ValueError):
        MixedGraph(2, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        MixedGraph(2, [(0, 2)])
    with pytest.raises(ValueError):
        MixedGraph(-1)


def test_neighbour_sets(collider_truth):
    g = collider_truth
    assert sorted(g.parents(1)) == [0, 3]
    assert sorted(g.children(0)) == [1, 2]
    assert g.spouses(0) == frozenset()
    assert g.adjacent(0, 1) and g.adjacent(1, 0)
    assert not g.adjacent(0, 3)
    assert g.num_edges == 4


def test_ancestor_masks_match_iterated_parents():
    rng = substream(0, "verify", 101)
    for _ in range(40):
        n = int(rng.integers(2, 8))
        g = random_ancestral_graph(n, rng)
        # reference closure: repeatedly expand parent sets to a fixpoint
        anc = [1 << v for v in range(n)]
        changed = True
        while changed:
            changed = False
            for v in range(n):
                m = anc[v]
                for p in range(n):
                    if g.has_directed(p, v):
                        m |= anc[p]
                if m != anc[v]:
                    anc[v] = m
                    changed = True
        assert list(g.ancestor_masks()) == anc
        for v in range(n):
            assert g.ancestors(v) == frozenset(
                u for u in range(n) if anc[v] >> u & 1
            )


def test_ancestral_detection():
    assert not MixedGraph(3, [(0, 1), (1, 2), (2, 0)]).is_ancestral()
    # bidirected edge between ancestrally related vertices
    g = MixedGraph(3, [(0, 1), (1, 2)], [(0, 2)])
    assert not g.is_ancestral()
    assert MixedGraph(3, [(0, 1), (1, 2)], []).is_ancestral()


def test_skeleton_and_v_structures(collider_truth):
    g = collider_truth
    assert g.skeleton() == frozenset({(0, 1), (0, 2), (1, 2), (1, 3)})
    assert g.v_structures() == frozenset({(0, 1, 3)})
    fork = MixedGraph(3, [(1, 0), (1, 2)])
    assert fork.v_structures() == frozenset()
    coll = MixedGraph(3, [(0, 2), (1, 2)])
    assert coll.v_structures() == frozenset({(0, 2, 1)})


def test_with_edge_removed_any_orientation(collider_truth):
    g = collider_truth
    assert not g.with_edge_removed(0, 1).adjacent(0, 1)
    assert not g.with_edge_removed(1, 0).adjacent(0, 1)
    h = MixedGraph(2, [], [(0, 1)])
    assert h.with_edge_removed(1, 0).num_edges == 0
    with pytest.raises(ValueError):
        g.with_edge_removed(0, 3)


def test_with_bidirected_added_and_induced_subgraph(collider_truth):
    g = collider_truth.with_bidirected_added(3, 2)
    assert g.has_bidirected(2, 3)
    sub = collider_truth.induced_subgraph([3, 1, 0])
    assert sub.n == 3
    assert set(sub.directed_edges()) == {(0, 1), (2, 1)}


def test_edge_marks_and_paths(collider_truth):
    assert edge_marks(collider_truth, 0, 1) == ("tail", "head")
    assert edge_marks(collider_truth, 1, 0) == ("head", "tail")
    g = MixedGraph(2, [], [(0, 1)])
    assert edge_marks(g, 0, 1) == ("head", "head")
    with pytest.raises(ValueError):
        edge_marks(collider_truth, 0, 3)
    p = path_between(collider_truth, [3, 1, 2])
    assert len(p) == 2
    assert p.marks == (("tail", "head"), ("tail", "head"))


def test_discriminating_paths_minimal_instance():
    # the unique shortest configuration: one collider parent of the endpoint
    g = MixedGraph(4, [(0, 1), (1, 3), (2, 3)], [(1, 2)])
    assert [(p.vertices, k, j) for p, k, j in discriminating_paths(g)] == [
        ((0, 1, 2, 3), 2, 3)
    ]
    assert has_discriminating_path(g, 2, 3)
    assert not has_discriminating_path(g, 1, 3)
    assert discriminating_paths(MixedGraph(3, [(0, 1), (1, 2)])) == ()


def test_json_round_trip(tmp_path, confounded_truth):
    doc = graph_to_json(confounded_truth, labels=list("abcde"))
    back, labels = graph_from_json(doc)
    assert back == confounded_truth
    assert labels == list("abcde")
    path = tmp_path / "g.json"
    save_graph(confounded_truth, path)
    loaded, default_labels = load_graph(path)
    assert loaded == confounded_truth
    assert len(default_labels) == 5


def test_equality_and_hash(collider_truth):
    same = MixedGraph(4, [(3, 1), (1, 2), (0, 2), (0, 1)])
    assert same == collider_truth
    assert hash(same) == hash(collider_truth)
    assert same != collider_truth.with_edge_removed(0, 1)
