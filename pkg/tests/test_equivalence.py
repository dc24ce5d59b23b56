import pytest

from gspo.equivalence import (
    TO_BIDIRECTED,
    TO_DIRECTED,
    MarkChange,
    apply_mark_change,
    enumerate_dmags,
    enumerate_mec,
    is_maximal,
    legitimate_mark_changes,
    markov_equivalent,
    maximal_closure,
)
from gspo.graphs import MixedGraph
from gspo.imap import poset_to_ancestral_graph
from gspo.ci import GraphOracle
from gspo.posets import ancestor_poset
from gspo.rng import substream
from gspo.separation import independence_model
from gspo.verify import random_ancestral_graph


def test_is_maximal_detects_inducing_path(collider_truth):
    assert is_maximal(collider_truth)
    # 0 <-> 1 <-> 2 <-> 3 with 1 -> 3 and 2 -> 0: the pair (0, 3) is
    # inseparable yet non-adjacent
    g = MixedGraph(4, [(1, 3), (2, 0)], [(0, 1), (1, 2), (2, 3)])
    assert g.is_ancestral()
    assert not is_maximal(g)


def test_maximal_closure_adds_inseparable_pairs():
    g = MixedGraph(4, [(1, 3), (2, 0)], [(0, 1), (1, 2), (2, 3)])
    closed = maximal_closure(g)
    assert set(closed.bidirected_edges()) - set(g.bidirected_edges()) == {(0, 3)}
    assert closed.directed_edges() == g.directed_edges()
    assert is_maximal(closed)
    assert maximal_closure(closed) == closed


def test_closure_preserves_independence_model():
    rng = substream(0, "verify", 104)
    for _ in range(40):
        n = int(rng.integers(3, 6))
        g = random_ancestral_graph(n, rng)
        closed = maximal_closure(g)
        assert independence_model(closed) == independence_model(g)
        assert is_maximal(closed)


def test_closure_example(confounded_truth, confounded_poset):
    oracle = GraphOracle(confounded_truth)
    first = poset_to_ancestral_graph(confounded_poset, oracle)
    inner = poset_to_ancestral_graph(ancestor_poset(first), oracle)
    closed = maximal_closure(inner)
    assert set(closed.bidirected_edges()) - set(inner.bidirected_edges()) == {(1, 3)}


def test_markov_equivalent_basic():
    chain = MixedGraph(3, [(0, 1), (1, 2)])
    assert markov_equivalent(chain, MixedGraph(3, [(2, 1), (1, 0)]))
    assert markov_equivalent(chain, MixedGraph(3, [(1, 0), (1, 2)]))
    assert not markov_equivalent(chain, MixedGraph(3, [(0, 1), (2, 1)]))
    one = MixedGraph(2, [(0, 1)])
    assert markov_equivalent(one, MixedGraph(2, [], [(0, 1)]))


def test_markov_equivalent_needs_discriminating_agreement():
    # same skeleton and v-structures, different collider status at the
    # discriminated vertex 2 on the path (0, 1, 2, 3)
    g = MixedGraph(4, [(0, 1), (1, 3), (2, 3)], [(1, 2)])
    h = MixedGraph(4, [(0, 1), (1, 3)], [(1, 2), (2, 3)])
    assert g.skeleton() == h.skeleton()
    assert g.v_structures() == h.v_structures()
    assert not markov_equivalent(g, h)
    assert independence_model(g) != independence_model(h)


def test_single_edge_mec():
    one = MixedGraph(2, [(0, 1)])
    assert legitimate_mark_changes(one) == [MarkChange(0, 1, TO_BIDIRECTED)]
    mec = enumerate_mec(one)
    assert len(mec) == 3
    assert MixedGraph(2, [(1, 0)]) in mec
    assert MixedGraph(2, [], [(0, 1)]) in mec


def test_mark_changes_stay_equivalent():
    rng = substream(0, "verify", 105)
    for _ in range(40):
        n = int(rng.integers(2, 6))
        g = maximal_closure(random_ancestral_graph(n, rng))
        for change in legitimate_mark_changes(g):
            h = apply_mark_change(g, change)
            assert h.is_ancestral() and is_maximal(h)
            assert markov_equivalent(g, h), (g, change)


def test_apply_mark_change_validates():
    g = MixedGraph(4, [(0, 1), (1, 3), (2, 3)], [(1, 2)])
    with pytest.raises(ValueError):
        apply_mark_change(g, MarkChange(0, 3, TO_BIDIRECTED))
    # flipping 2 -> 3 flips the discriminated collider status
    assert MarkChange(2, 3, TO_BIDIRECTED) not in legitimate_mark_changes(g)
    with pytest.raises(ValueError):
        apply_mark_change(g, MarkChange(2, 3, TO_BIDIRECTED))


def test_enumerate_mec_is_class_invariant():
    rng = substream(0, "verify", 106)
    for _ in range(10):
        g = maximal_closure(random_ancestral_graph(4, rng))
        mec = set(enumerate_mec(g))
        assert g in mec
        for h in list(mec)[:4]:
            assert set(enumerate_mec(h)) == mec


def test_enumerate_dmags_counts():
    assert sum(1 for _ in enumerate_dmags(1)) == 1
    assert sum(1 for _ in enumerate_dmags(2)) == 4
    assert sum(1 for _ in enumerate_dmags(3)) == 56


def test_enumerate_dmags_matches_brute_force_on_three():
    # brute force over all 4^3 mark assignments of the three vertex pairs
    pairs = [(0, 1), (0, 2), (1, 2)]
    found = set()
    for code in range(4**3):
        directed, bidirected = [], []
        c = code
        for i, j in pairs:
            state = c % 4
            c //= 4
            if state == 1:
                directed.append((i, j))
            elif state == 2:
                directed.append((j, i))
            elif state == 3:
                bidirected.append((i, j))
        g = MixedGraph(3, directed, bidirected)
        if g.is_ancestral() and is_maximal(g):
            found.add(g)
    enumerated = set(enumerate_dmags(3))
    assert enumerated == found
    for g in enumerated:
        assert g.is_ancestral() and is_maximal(g)
