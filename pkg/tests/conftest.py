import numpy as np
import pytest

from gspo.graphs import MixedGraph
from gspo.posets import Poset
from gspo.simulate import WeightedDAG


@pytest.fixture
def collider_truth():
    # 0 -> 1 <- 3 is the only v-structure; the triple at 2 is shielded
    return MixedGraph(4, [(0, 1), (0, 2), (1, 2), (3, 1)])


@pytest.fixture
def collider_poset():
    return Poset.from_relations(4, [(1, 2), (0, 3)])


@pytest.fixture
def confounded_truth():
    return MixedGraph(5, [(3, 4), (0, 1), (2, 1), (2, 0), (2, 3)], [(0, 3)])


@pytest.fixture
def confounded_poset():
    return Poset.from_relations(5, [(0, 1), (2, 3), (4, 3)])


@pytest.fixture
def cancelling_sem():
    # two root-to-sink paths with opposite signs, so cov(0, 5) is exactly zero
    dag = MixedGraph(6, [(0, 1), (0, 3), (1, 2), (3, 4), (2, 5), (4, 5)])
    weights = np.zeros((6, 6))
    for i, j in dag.directed_edges():
        weights[i, j] = 1.0
    weights[4, 5] = -1.0
    return WeightedDAG(dag, weights)
