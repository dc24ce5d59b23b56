"""m-separation queries on mixed graphs.

A path m-connects i and j given S when every non-collider on it lies outside
S and every collider is in S or has a descendant in S. The fast path runs
reachability over (vertex, incoming mark) states, resolving the collider rule
with a precomputed mask of vertices having a descendant in S; the brute-force
checker enumerates simple paths and applies the definition literally.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable

from .graphs import MixedGraph
from .util import iter_bits, mask_of, set_of


def _validate_query(g: MixedGraph, i: int, j: int, cond_mask: int) -> None:
    if not (0 <= i < g.n and 0 <= j < g.n):
        raise ValueError(f"query vertices ({i}, {j}) out of range")
    if i == j:
        raise ValueError("query endpoints must differ")
    if cond_mask >> g.n:
        raise ValueError("conditioning set out of range")
    if cond_mask >> i & 1 or cond_mask >> j & 1:
        raise ValueError("conditioning set must exclude the endpoints")


def m_connected_mask(g: MixedGraph, i: int, j: int, cond_mask: int) -> bool:
    """m-connection with the conditioning set given as a bitmask."""
    _validate_query(g, i, j, cond_mask)
    if g.adjacent(i, j):
        return True
    an_s = g.ancestor_mask_of_set(cond_mask)  # v with de(v) n S != 0
    pa, ch, sib = g._pa, g._ch, g._sib
    target = 1 << j
    head_seen = 0  # reached with an arrowhead at the vertex
    tail_seen = 0
    stack: list[tuple[int, bool]] = []

    def push(vmask: int, head: bool) -> None:
        nonlocal head_seen, tail_seen
        new = vmask & ~(head_seen if head else tail_seen)
        if not new:
            return
        if head:
            head_seen |= new
        else:
            tail_seen |= new
        for v in iter_bits(new):
            stack.append((v, head))

    push(ch[i] | sib[i], True)
    push(pa[i], False)
    while stack:
        v, head = stack.pop()
        if (head_seen | tail_seen) & target:
            return True
        vbit = 1 << v
        if head:
            if an_s & vbit:  # collider continuation
                push(pa[v], False)
                push(sib[v], True)
            if not (cond_mask & vbit):  # non-collider continuation
                push(ch[v], True)
        else:
            if not (cond_mask & vbit):
                push(ch[v] | sib[v], True)
                push(pa[v], False)
    return bool((head_seen | tail_seen) & target)


def m_connected(g: MixedGraph, i: int, j: int, cond: Iterable[int] = ()) -> bool:
    """True iff i and j are m-connected given the conditioning set."""
    return m_connected_mask(g, i, j, mask_of(cond))


def m_separated(g: MixedGraph, i: int, j: int, cond: Iterable[int] = ()) -> bool:
    return not m_connected_mask(g, i, j, mask_of(cond))


def brute_force_m_connected(
    g: MixedGraph, i: int, j: int, cond: Iterable[int] = ()
) -> bool:
    """Reference checker: enumerate simple paths, apply the path rule.

    Only for graphs with at most 8 vertices.
    """
    if g.n > 8:
        raise ValueError("brute-force checker supports at most 8 vertices")
    cond_mask = mask_of(cond)
    _validate_query(g, i, j, cond_mask)
    desc = g.descendant_masks()
    pa, sib = g._pa, g._sib

    def connects(path: list[int]) -> bool:
        for t in range(1, len(path) - 1):
            v = path[t]
            before, after = path[t - 1], path[t + 1]
            head_in = bool((pa[v] | sib[v]) >> before & 1)
            head_out = bool((pa[v] | sib[v]) >> after & 1)
            if head_in and head_out:  # collider
                if not (desc[v] & cond_mask):
                    return False
            elif cond_mask >> v & 1:
                return False
        return True

    def walk(v: int, seen: int, path: list[int]) -> bool:
        if v == j:
            return connects(path)
        for w in iter_bits(g.adjacency_mask(v) & ~seen):
            path.append(w)
            if walk(w, seen | (1 << w), path):
                return True
            path.pop()
        return False

    return walk(i, 1 << i, [i])


def separable_by_ancestors(
    g: MixedGraph, i: int, j: int
) -> tuple[bool, frozenset[int]]:
    """Decide whether any set m-separates non-adjacent i and j.

    For ancestral graphs it suffices to test the single candidate
    an({i, j}) \\ {i, j}; returns (separable, that candidate set).
    """
    if g.adjacent(i, j):
        raise ValueError(f"{i} and {j} are adjacent")
    pair = (1 << i) | (1 << j)
    cand = g.ancestor_mask_of_set(pair) & ~pair
    return not m_connected_mask(g, i, j, cand), set_of(cand)


def independence_model(
    g: MixedGraph,
) -> frozenset[tuple[int, int, frozenset[int]]]:
    """All m-separation statements (i, j, S) of g, i < j, S over V \\ {i, j}.

    Exhaustive; intended for verification at small sizes.
    """
    out = set()
    for i, j in combinations(range(g.n), 2):
        rest = [v for v in range(g.n) if v != i and v != j]
        for r in range(len(rest) + 1):
            for sub in combinations(rest, r):
                smask = mask_of(sub)
                if not m_connected_mask(g, i, j, smask):
                    out.add((i, j, frozenset(sub)))
    return frozenset(out)
