"""Maximality, Markov equivalence, and mark changes for ancestral graphs.

Two maximal ancestral graphs are Markov equivalent iff they share skeleta and
v-structures and agree on the collider status of the discriminated vertex
along every path that is discriminating in both. The same class is generated
transformationally by legitimate mark changes; both routes are implemented
and cross-validated in the tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator

from .graphs import HEAD, MixedGraph, discriminating_paths, has_discriminating_path
from .separation import separable_by_ancestors
from .util import iter_bits

_MEC_CAP = 10
_DMAG_ENUMERATION_CAP = 4

TO_BIDIRECTED = "to_bidirected"
TO_DIRECTED = "to_directed"


@dataclass(frozen=True, order=True)
class MarkChange:
    """Replace edge i->j by i<->j (to_bidirected) or i<->j by i->j
    (to_directed)."""

    i: int
    j: int
    direction: str


@lru_cache(maxsize=65536)
def is_maximal(g: MixedGraph) -> bool:
    """True iff every non-adjacent pair of the ancestral graph g can be
    m-separated by some set."""
    if not g.is_ancestral():
        raise ValueError("graph is not ancestral")
    for i, j in combinations(range(g.n), 2):
        if not g.adjacent(i, j):
            separable, _ = separable_by_ancestors(g, i, j)
            if not separable:
                return False
    return True


def maximal_closure(g: MixedGraph) -> MixedGraph:
    """The unique maximal supergraph of g with the same separation statements.

    Adds i<->j for every non-adjacent pair with no separating set, iterating
    to a fixed point. Raises if a fill-in pair is ancestrally related, since
    then no bidirected completion exists.
    """
    if not g.is_ancestral():
        raise ValueError("graph is not ancestral")
    current = g
    while True:
        anc = current.ancestor_masks()
        added = []
        for i, j in combinations(range(current.n), 2):
            if current.adjacent(i, j):
                continue
            separable, _ = separable_by_ancestors(current, i, j)
            if separable:
                continue
            if anc[j] >> i & 1 or anc[i] >> j & 1:
                raise ValueError(
                    f"inseparable pair ({i}, {j}) is ancestrally related; "
                    "no bidirected completion exists"
                )
            added.append((i, j))
        if not added:
            return current
        current = MixedGraph(
            current.n,
            current.directed_edges(),
            current.bidirected_edges() + added,
        )


def _collider_status_on_path(g: MixedGraph, prev: int, v: int, nxt: int) -> bool:
    head_in = bool((g.parent_mask(v) | g.spouse_mask(v)) >> prev & 1)
    head_out = bool((g.parent_mask(v) | g.spouse_mask(v)) >> nxt & 1)
    return head_in and head_out


def _is_discriminating_in(g: MixedGraph, vertices: tuple[int, ...]) -> bool:
    """Does this vertex sequence form a discriminating path for its
    second-to-last vertex in g?"""
    if len(vertices) < 4:
        return False
    i, j = vertices[0], vertices[-1]
    if g.adjacent(i, j):
        return False
    pa_j = g.parent_mask(j)
    for t in range(1, len(vertices) - 2):
        v = vertices[t]
        if not (pa_j >> v & 1):
            return False
        if not _collider_status_on_path(g, vertices[t - 1], v, vertices[t + 1]):
            return False
    # consecutive vertices must be adjacent in g as well
    for t in range(len(vertices) - 1):
        if not g.adjacent(vertices[t], vertices[t + 1]):
            return False
    return True


def markov_equivalent(g: MixedGraph, h: MixedGraph) -> bool:
    """Markov equivalence of two maximal ancestral graphs."""
    if g.n != h.n:
        raise ValueError("graphs must share a vertex count")
    if not (is_maximal(g) and is_maximal(h)):
        raise ValueError("both graphs must be maximal ancestral")
    if g.skeleton() != h.skeleton():
        return False
    if g.v_structures() != h.v_structures():
        return False
    for path, k, _j in discriminating_paths(g):
        vs = path.vertices
        if not _is_discriminating_in(h, vs):
            continue
        g_coll = path.marks[-2][1] == HEAD and path.marks[-1][0] == HEAD
        h_coll = _collider_status_on_path(h, vs[-3], k, vs[-1])
        if g_coll != h_coll:
            return False
    return True


def _mark_change_ok(g: MixedGraph, i: int, j: int) -> bool:
    # no directed path i -> ... -> j besides a possible direct edge
    frontier = g.child_mask(i) & ~(1 << j)
    reached = frontier
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= g.child_mask(v)
        frontier = nxt & ~reached
        reached |= frontier
    if reached >> j & 1:
        return False
    # parents of i must be parents of j; spouses of i (except j) must be
    # parents or spouses of j
    if g.parent_mask(i) & ~g.parent_mask(j):
        return False
    if (g.spouse_mask(i) & ~(1 << j)) & ~(g.parent_mask(j) | g.spouse_mask(j)):
        return False
    # no discriminating path for i ending at j
    return not has_discriminating_path(g, i, j)


def legitimate_mark_changes(g: MixedGraph) -> list[MarkChange]:
    """All single-edge mark changes preserving the Markov equivalence class,
    sorted by (i, j, direction)."""
    if not g.is_ancestral():
        raise ValueError("graph is not ancestral")
    out = []
    for i, j in g.directed_edges():
        if _mark_change_ok(g, i, j):
            out.append(MarkChange(i, j, TO_BIDIRECTED))
    for a, b in g.bidirected_edges():
        for i, j in ((a, b), (b, a)):
            if _mark_change_ok(g, i, j):
                out.append(MarkChange(i, j, TO_DIRECTED))
    return sorted(out)


def apply_mark_change(g: MixedGraph, change: MarkChange) -> MixedGraph:
    """Apply a mark change after re-validating its legitimacy."""
    i, j, direction = change.i, change.j, change.direction
    if direction == TO_BIDIRECTED:
        if not g.has_directed(i, j):
            raise ValueError(f"no directed edge {i}->{j}")
    elif direction == TO_DIRECTED:
        if not g.has_bidirected(i, j):
            raise ValueError(f"no bidirected edge {i}<->{j}")
    else:
        raise ValueError(f"unknown direction {direction!r}")
    if not _mark_change_ok(g, i, j):
        raise ValueError(f"mark change {change} is not legitimate")
    return _apply_unchecked(g, change)


def _apply_unchecked(g: MixedGraph, change: MarkChange) -> MixedGraph:
    i, j = change.i, change.j
    if change.direction == TO_BIDIRECTED:
        directed = [e for e in g.directed_edges() if e != (i, j)]
        bidirected = g.bidirected_edges() + [(min(i, j), max(i, j))]
    else:
        pair = (min(i, j), max(i, j))
        directed = g.directed_edges() + [(i, j)]
        bidirected = [e for e in g.bidirected_edges() if e != pair]
    return MixedGraph(g.n, directed, bidirected)


def enumerate_mec(g: MixedGraph) -> list[MixedGraph]:
    """The Markov equivalence class of g, generated transformationally by
    closing under legitimate mark changes. Deterministic order."""
    if g.n > _MEC_CAP:
        raise ValueError(f"MEC enumeration supported for n <= {_MEC_CAP}")
    if not is_maximal(g):
        raise ValueError("graph must be maximal ancestral")
    seen = {g}
    frontier = [g]
    while frontier:
        nxt = []
        for h in frontier:
            for change in legitimate_mark_changes(h):
                h2 = _apply_unchecked(h, change)
                if h2 not in seen:
                    seen.add(h2)
                    nxt.append(h2)
        frontier = nxt
    return sorted(
        seen, key=lambda x: (sorted(x.directed_edges()), sorted(x.bidirected_edges()))
    )


def enumerate_dmags(n: int) -> Iterator[MixedGraph]:
    """All maximal ancestral graphs on n vertices, each exactly once, in
    lexicographic order of the pair-state assignment. Supported for n <= 4."""
    if n > _DMAG_ENUMERATION_CAP:
        raise ValueError(
            f"exhaustive enumeration supported for n <= {_DMAG_ENUMERATION_CAP}"
        )
    pairs = list(combinations(range(n), 2))
    for states in product(range(4), repeat=len(pairs)):
        directed = []
        bidirected = []
        for (i, j), s in zip(pairs, states):
            if s == 1:
                directed.append((i, j))
            elif s == 2:
                directed.append((j, i))
            elif s == 3:
                bidirected.append((i, j))
        g = MixedGraph(n, directed, bidirected)
        if g.is_ancestral() and is_maximal(g):
            yield g
