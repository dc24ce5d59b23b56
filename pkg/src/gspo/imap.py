"""From posets to minimal independence maps.

Given a poset pi and a CI oracle, the induced ancestral graph joins each
dependent pair, directing the edge when the endpoints are ordered and making
it bidirected otherwise; the conditioning set is always the strict down-set
of the pair. The minimal-IMAP construction re-derives the poset from that
graph's ancestry, rebuilds, and completes to a maximal graph.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .ci import CIOracle
from .equivalence import is_maximal, maximal_closure
from .graphs import MixedGraph, discriminating_paths
from .posets import Poset, ancestor_poset
from .separation import m_connected_mask, separable_by_ancestors
from .util import iter_bits, set_of


def poset_to_ancestral_graph(poset: Poset, oracle: CIOracle) -> MixedGraph:
    """The ancestral graph induced by a poset and the oracle's answers.

    For each pair {i, j}, query independence given the strict down-set of the
    pair; a dependent ordered pair gets i->j (when i <= j), a dependent
    incomparable pair gets i<->j.
    """
    n = poset.n
    if oracle.num_variables != n:
        raise ValueError("oracle and poset disagree on the variable count")
    directed = []
    bidirected = []
    for i, j in combinations(range(n), 2):
        pair = (1 << i) | (1 << j)
        cond = poset.down_mask(pair) & ~pair
        if oracle.independent_mask(i, j, cond):
            continue
        if poset.leq(i, j):
            directed.append((i, j))
        elif poset.leq(j, i):
            directed.append((j, i))
        else:
            bidirected.append((i, j))
    g = MixedGraph(n, directed, bidirected)
    if not g.is_ancestral():
        raise AssertionError("induced graph is not ancestral")
    return g


class MinimalImapCache:
    """Memo for the poset-to-minimal-IMAP map against one oracle.

    The result depends on the start poset only through the ancestor poset of
    the first induced graph, so caching is two level: poset -> derived poset,
    derived poset -> closed graph.
    """

    def __init__(self, oracle: CIOracle):
        self.oracle = oracle
        self._derived: dict[Poset, Poset] = {}
        self._closed: dict[Poset, MixedGraph] = {}

    def graph_for(self, poset: Poset) -> MixedGraph:
        derived = self._derived.get(poset)
        if derived is None:
            first = poset_to_ancestral_graph(poset, self.oracle)
            derived = ancestor_poset(first)
            self._derived[poset] = derived
        closed = self._closed.get(derived)
        if closed is None:
            inner = poset_to_ancestral_graph(derived, self.oracle)
            closed = maximal_closure(inner)
            self._closed[derived] = closed
        return closed


def poset_to_minimal_imap(
    poset: Poset, oracle: CIOracle, cache: MinimalImapCache | None = None
) -> MixedGraph:
    """The minimal IMAP induced by a poset: rebuild on the ancestry of the
    induced graph, then complete to the maximal closure."""
    if cache is None:
        cache = MinimalImapCache(oracle)
    elif cache.oracle is not oracle:
        raise ValueError("cache was built for a different oracle")
    return cache.graph_for(poset)


def is_imap(g: MixedGraph, oracle: CIOracle) -> bool:
    """True iff every m-separation of g maps to an oracle independence.

    Uses the pairwise reduction: it suffices to check each non-adjacent pair
    given the strict ancestors of the pair.
    """
    if not g.is_ancestral():
        raise ValueError("graph is not ancestral")
    if oracle.num_variables != g.n:
        raise ValueError("oracle and graph disagree on the variable count")
    anc = g.ancestor_masks()
    for i, j in combinations(range(g.n), 2):
        if g.adjacent(i, j):
            continue
        pair = (1 << i) | (1 << j)
        cond = (anc[i] | anc[j]) & ~pair
        if not oracle.independent_mask(i, j, cond):
            return False
    return True


def imap_witness(
    g: MixedGraph, oracle: CIOracle
) -> tuple[int, int, frozenset[int]] | None:
    """The first failed pairwise check (i, j, S), or None when g is an IMAP."""
    anc = g.ancestor_masks()
    for i, j in combinations(range(g.n), 2):
        if g.adjacent(i, j):
            continue
        pair = (1 << i) | (1 << j)
        cond = (anc[i] | anc[j]) & ~pair
        if not oracle.independent_mask(i, j, cond):
            return (i, j, set_of(cond))
    return None


def is_minimal_imap(g: MixedGraph, oracle: CIOracle) -> bool:
    """True iff g is an IMAP and no single edge deletion leaves a graph that
    is still maximal and still an IMAP. Deleted graphs are tested as they
    are, without re-closing."""
    if not is_imap(g, oracle):
        raise ValueError("graph is not an IMAP of the oracle")
    for i, j in sorted(g.skeleton()):
        smaller = g.with_edge_removed(i, j)
        if is_maximal(smaller) and is_imap(smaller, oracle):
            return False
    return True


@dataclass
class FaithfulnessViolation:
    i: int
    j: int
    cond: frozenset[int]
    context: str


@dataclass
class FaithfulnessReport:
    """Exhaustive clause-by-clause restricted-faithfulness audit."""

    adjacency: list[FaithfulnessViolation] = field(default_factory=list)
    orientation: list[FaithfulnessViolation] = field(default_factory=list)
    discriminating: list[FaithfulnessViolation] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not (self.adjacency or self.orientation or self.discriminating)


def check_restricted_faithfulness(
    g: MixedGraph, oracle: CIOracle
) -> FaithfulnessReport:
    """Audit the three restricted-faithfulness clauses of the oracle against
    the ground-truth graph g, enumerating conditioning sets exhaustively.

    Clauses: every edge pair stays dependent for all S; every unshielded
    triple pair and every endpoint pair of a discriminating path stays
    dependent whenever m-connected. Supported for graphs with at most 8
    vertices.
    """
    if g.n > 8:
        raise ValueError("exhaustive faithfulness audit supports at most 8 vertices")
    if not g.is_ancestral():
        raise ValueError("graph is not ancestral")
    report = FaithfulnessReport()

    def subsets(i: int, j: int):
        excl = (1 << i) | (1 << j)
        free = [v for v in range(g.n) if not excl >> v & 1]
        for bits in range(1 << len(free)):
            mask = 0
            for k, v in enumerate(free):
                if bits >> k & 1:
                    mask |= 1 << v
            yield mask

    for i, j in sorted(g.skeleton()):
        for smask in subsets(i, j):
            if oracle.independent_mask(i, j, smask):
                report.adjacency.append(
                    FaithfulnessViolation(i, j, set_of(smask), f"edge ({i}, {j})")
                )

    checked: set[tuple[int, int]] = set()
    for k in range(g.n):
        nbrs = list(iter_bits(g.adjacency_mask(k)))
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                i, j = nbrs[a], nbrs[b]
                if g.adjacent(i, j) or (i, j) in checked:
                    continue
                checked.add((i, j))
                for smask in subsets(i, j):
                    if m_connected_mask(g, i, j, smask) and oracle.independent_mask(
                        i, j, smask
                    ):
                        report.orientation.append(
                            FaithfulnessViolation(
                                i, j, set_of(smask), f"unshielded triple ({i}, {k}, {j})"
                            )
                        )

    seen_pairs: set[tuple[int, int]] = set()
    for path, _k, j in discriminating_paths(g):
        i = path.vertices[0]
        a, b = min(i, j), max(i, j)
        if (a, b) in seen_pairs:
            continue
        seen_pairs.add((a, b))
        for smask in subsets(a, b):
            if m_connected_mask(g, a, b, smask) and oracle.independent_mask(
                a, b, smask
            ):
                report.discriminating.append(
                    FaithfulnessViolation(
                        a, b, set_of(smask), f"discriminating path {path.vertices}"
                    )
                )
    return report
